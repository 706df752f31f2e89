//! Session registry and on-disk persistence.
//!
//! Each session lives in `<data-dir>/<id>/`: `snapshot.json` holds the
//! result of inference, `actions.log` one JSON object per line for every
//! accept, reject and teleport, replayed in order on startup.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::field::DirectionField;
use crate::graph::RoadGraph;
use crate::io::{graph_from_json, graph_to_json};
use crate::search::SearchStats;

use super::session::{Action, Segment, SegmentStatus, Session, SessionParams, TeleportTarget};
use super::ServerError;

const SNAPSHOT: &str = "snapshot.json";
const ACTIONS: &str = "actions.log";
const SNAPSHOT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Snapshot {
    version: u32,
    id: String,
    params: SessionParams,
    stats: SearchStats,
    base: Value,
    inferred: Value,
    segments: Vec<Segment>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum LogEntry {
    Accept { segment: u64 },
    Reject { segment: u64 },
    Teleport,
}

type Shared = Arc<RwLock<Session>>;

/// All sessions of one server. Reads of a session run concurrently;
/// mutations of one session are serialized.
#[derive(Default)]
pub struct SessionStore {
    dir: Option<PathBuf>,
    sessions: RwLock<BTreeMap<String, Shared>>,
}

impl SessionStore {
    /// A store that keeps nothing on disk.
    pub fn in_memory() -> Self {
        SessionStore::default()
    }

    /// Opens `dir`, creating it if needed, and loads every session in it.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, ServerError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut sessions = BTreeMap::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if !path.join(SNAPSHOT).is_file() {
                continue;
            }
            let session = load_session(&path)?;
            log::info!("loaded session {} from {}", session.id(), path.display());
            sessions.insert(session.id().to_string(), Arc::new(RwLock::new(session)));
        }
        Ok(SessionStore {
            dir: Some(dir),
            sessions: RwLock::new(sessions),
        })
    }

    pub fn ids(&self) -> Vec<String> {
        self.sessions.read().unwrap().keys().cloned().collect()
    }

    /// Builds and persists a new session, returning its id.
    pub fn create(
        &self,
        base: &RoadGraph,
        field: &DirectionField,
        params: SessionParams,
    ) -> Result<String, ServerError> {
        let id = loop {
            let id = format!("{:016x}", rand::random::<u64>());
            if !self.sessions.read().unwrap().contains_key(&id) {
                break id;
            }
        };
        let session = Session::build(id.clone(), base, field, params)?;
        if let Some(dir) = &self.dir {
            write_snapshot(&dir.join(&id), &session)?;
        }
        self.sessions
            .write()
            .unwrap()
            .insert(id.clone(), Arc::new(RwLock::new(session)));
        Ok(id)
    }

    fn get(&self, id: &str) -> Result<Shared, ServerError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ServerError::UnknownSession(id.to_string()))
    }

    /// Runs `f` with shared access to a session.
    pub fn read<T>(&self, id: &str, f: impl FnOnce(&Session) -> T) -> Result<T, ServerError> {
        let s = self.get(id)?;
        let guard = s.read().unwrap();
        Ok(f(&guard))
    }

    pub fn act(&self, id: &str, segment: u64, action: Action) -> Result<SegmentStatus, ServerError> {
        let s = self.get(id)?;
        let mut session = s.write().unwrap();
        let status = session.act(segment, action)?;
        let entry = match action {
            Action::Accept => LogEntry::Accept { segment },
            Action::Reject => LogEntry::Reject { segment },
        };
        if let Err(e) = self.append(id, &entry) {
            session.undo_action(segment);
            return Err(e);
        }
        Ok(status)
    }

    pub fn teleport(&self, id: &str) -> Result<Option<TeleportTarget>, ServerError> {
        let s = self.get(id)?;
        let mut session = s.write().unwrap();
        let before = session.cursor_position();
        let target = session.teleport();
        if session.cursor_position() != before {
            if let Err(e) = self.append(id, &LogEntry::Teleport) {
                session.rewind_cursor(before);
                return Err(e);
            }
        }
        Ok(target)
    }

    fn append(&self, id: &str, entry: &LogEntry) -> Result<(), ServerError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let mut line = serde_json::to_string(entry).expect("log entry serializes");
        line.push('\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join(id).join(ACTIONS))?;
        f.write_all(line.as_bytes())?;
        f.sync_data()?;
        Ok(())
    }
}

fn write_snapshot(dir: &Path, session: &Session) -> Result<(), ServerError> {
    fs::create_dir_all(dir)?;
    let snap = Snapshot {
        version: SNAPSHOT_VERSION,
        id: session.id().to_string(),
        params: *session.params(),
        stats: session.stats(),
        base: graph_to_json(session.base()),
        inferred: graph_to_json(session.inferred()),
        segments: session.segments().to_vec(),
    };
    let tmp = dir.join(format!("{SNAPSHOT}.tmp"));
    {
        let mut f = File::create(&tmp)?;
        serde_json::to_writer_pretty(&mut f, &snap).map_err(std::io::Error::from)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, dir.join(SNAPSHOT))?;
    File::create(dir.join(ACTIONS))?;
    Ok(())
}

fn load_session(dir: &Path) -> Result<Session, ServerError> {
    let path = dir.join(SNAPSHOT);
    let corrupt = |reason: String| ServerError::Corrupt {
        path: path.display().to_string(),
        reason,
    };
    let snap: Snapshot = serde_json::from_reader(BufReader::new(File::open(&path)?))
        .map_err(|e| corrupt(e.to_string()))?;
    if snap.version != SNAPSHOT_VERSION {
        return Err(corrupt(format!("unsupported version {}", snap.version)));
    }
    let base = graph_from_json(snap.base).map_err(|e| corrupt(e.to_string()))?;
    let inferred = graph_from_json(snap.inferred).map_err(|e| corrupt(e.to_string()))?;
    for (k, s) in snap.segments.iter().enumerate() {
        if s.id != k as u64 || s.vertices.len() < 2 || !s.vertices.iter().all(|&v| inferred.contains_vertex(v)) {
            return Err(corrupt(format!("bad segment {k}")));
        }
    }
    let mut session = Session::from_parts(snap.id, snap.params, base, inferred, snap.segments, snap.stats, 0);

    let log_path = dir.join(ACTIONS);
    if !log_path.exists() {
        return Ok(session);
    }
    let lines: Vec<String> = BufReader::new(File::open(&log_path)?).lines().collect::<Result<_, _>>()?;
    for (n, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: LogEntry = match serde_json::from_str(line) {
            Ok(e) => e,
            // a torn final write is dropped, anything earlier is corruption
            Err(e) if n + 1 == lines.len() => {
                log::warn!("{}: dropping incomplete last entry: {e}", log_path.display());
                let mut kept = lines[..n].join("\n");
                if n > 0 {
                    kept.push('\n');
                }
                fs::write(&log_path, kept)?;
                continue;
            }
            Err(e) => return Err(corrupt(format!("{ACTIONS} line {}: {e}", n + 1))),
        };
        let replayed = match entry {
            LogEntry::Accept { segment } => session.act(segment, Action::Accept).map(drop),
            LogEntry::Reject { segment } => session.act(segment, Action::Reject).map(drop),
            LogEntry::Teleport => {
                session.teleport();
                Ok(())
            }
        };
        replayed.map_err(|e| corrupt(format!("{ACTIONS} line {}: {e}", n + 1)))?;
    }
    Ok(session)
}
