//! Editing state of one validation session.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::{extract_peaks, DirectionField};
use crate::geo::BBox;
use crate::graph::{densify, EdgeId, RoadGraph, VertexId};
use crate::io::chains;
use crate::prune::{grid_cluster, prune_major, PruneParams};
use crate::search::{SearchError, SearchParams, SearchState, SearchStats};
use crate::teleport::{score_components, RankedComponent, TeleportCursor, DEFAULT_LAMBDA};

use super::ServerError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionParams {
    pub search: SearchParams,
    pub prune: PruneParams,
    /// Weight of one base-map connection in the teleport score.
    pub lambda: f64,
}

impl Default for SessionParams {
    fn default() -> Self {
        SessionParams {
            search: SearchParams::default(),
            prune: PruneParams::default(),
            lambda: DEFAULT_LAMBDA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentStatus {
    Pending,
    Accepted,
    Rejected,
}

impl fmt::Display for SegmentStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SegmentStatus::Pending => "pending",
            SegmentStatus::Accepted => "accepted",
            SegmentStatus::Rejected => "rejected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Accept,
    Reject,
}

/// One clickable unit: a chain of inferred edges between junctions,
/// base-map attachment points, or changes of major-road membership.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: u64,
    pub vertices: Vec<VertexId>,
    /// Every edge of the segment survived major-road pruning.
    pub pruned: bool,
    pub status: SegmentStatus,
}

impl Segment {
    pub fn num_edges(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Answer to a teleport request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportTarget {
    /// Rank of the component, 0 for the best.
    pub rank: usize,
    pub score: f64,
    pub area: f64,
    pub conn: usize,
    pub bbox: BBox,
    pub segments: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub pending: usize,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    params: SessionParams,
    base: RoadGraph,
    inferred: RoadGraph,
    segments: Vec<Segment>,
    /// Segment ids per ranked component.
    component_segments: Vec<Vec<u64>>,
    cursor: TeleportCursor,
    stats: SearchStats,
}

impl Session {
    /// Runs inference, pruning and ranking. The densified base map becomes
    /// the session's base. With an empty base the search starts from field
    /// peaks instead.
    pub fn build(
        id: String,
        base: &RoadGraph,
        field: &DirectionField,
        params: SessionParams,
    ) -> Result<Session, ServerError> {
        params
            .prune
            .validate()
            .map_err(|e| ServerError::Params(e.to_string()))?;
        if !(params.lambda >= 0.0) {
            return Err(ServerError::Params("lambda must be non-negative".into()));
        }
        if let Some(bb) = base.bbox() {
            if !bb.intersects(&field.grid().extent()) {
                return Err(ServerError::FrameMismatch);
            }
        }
        let outcome = if base.is_empty() {
            let seeds: Vec<_> = extract_peaks(field, params.search.threshold, 2.0 * params.search.step)
                .into_iter()
                .map(|p| p.point)
                .collect();
            match SearchState::from_seeds(field, &seeds, base.frame(), params.search) {
                Ok(s) => Some(s.run()),
                Err(SearchError::NoSeeds) => None,
                Err(e) => return Err(ServerError::Params(e.to_string())),
            }
        } else {
            let s = SearchState::from_basemap(field, base, params.search)
                .map_err(|e| ServerError::Params(e.to_string()))?;
            Some(s.run())
        };
        let g0 = densify(base, params.search.step);
        let (merged, inferred, stats) = match outcome {
            Some(out) => {
                let inferred = out.inferred();
                (out.graph, inferred, out.stats)
            }
            None => (g0.clone(), g0.empty_like(), SearchStats::default()),
        };
        log::info!(
            "session {id}: {} inferred edges, {} base edges",
            inferred.num_edges(),
            g0.num_edges()
        );

        let major: BTreeSet<(VertexId, VertexId)> = if inferred.num_edges() == 0 {
            BTreeSet::new()
        } else {
            let centers = grid_cluster(&merged, &params.prune);
            let pruned = prune_major(&merged, &centers, &params.prune)
                .map_err(|e| ServerError::Params(e.to_string()))?;
            pruned
                .major
                .iter()
                .map(|&e| {
                    let edge = merged.edge(e).expect("pruned edge exists");
                    (edge.a, edge.b)
                })
                .collect()
        };
        let segments = segment_inferred(&inferred, &g0, &major);
        Ok(Session::from_parts(id, params, g0, inferred, segments, stats, 0))
    }

    /// Reassembles a session from persisted parts. The ranking is
    /// recomputed, which is deterministic.
    pub fn from_parts(
        id: String,
        params: SessionParams,
        base: RoadGraph,
        inferred: RoadGraph,
        segments: Vec<Segment>,
        stats: SearchStats,
        cursor_position: usize,
    ) -> Session {
        let ranked = score_components(&inferred, &base, params.lambda);
        let component_of: HashMap<VertexId, usize> = ranked
            .iter()
            .enumerate()
            .flat_map(|(k, r)| r.component.vertex_ids().map(move |v| (v, k)))
            .collect();
        let mut component_segments = vec![Vec::new(); ranked.len()];
        for s in &segments {
            component_segments[component_of[&s.vertices[0]]].push(s.id);
        }
        Session {
            id,
            params,
            base,
            inferred,
            segments,
            component_segments,
            cursor: TeleportCursor::resume(ranked, cursor_position),
            stats,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &SessionParams {
        &self.params
    }

    /// Densified base map.
    pub fn base(&self) -> &RoadGraph {
        &self.base
    }

    pub fn inferred(&self) -> &RoadGraph {
        &self.inferred
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn ranked(&self) -> &[RankedComponent] {
        self.cursor.ranked()
    }

    pub fn cursor_position(&self) -> usize {
        self.cursor.position()
    }

    pub fn segment(&self, sid: u64) -> Result<&Segment, ServerError> {
        self.segments
            .get(sid as usize)
            .ok_or(ServerError::UnknownSegment(sid))
    }

    /// Pending and accepted segments. With `pruned`, pending segments off
    /// the major roads are left out.
    pub fn overlay(&self, pruned: bool) -> impl Iterator<Item = &Segment> + '_ {
        self.segments.iter().filter(move |s| match s.status {
            SegmentStatus::Accepted => true,
            SegmentStatus::Pending => !pruned || s.pruned,
            SegmentStatus::Rejected => false,
        })
    }

    pub fn act(&mut self, sid: u64, action: Action) -> Result<SegmentStatus, ServerError> {
        let seg = self
            .segments
            .get_mut(sid as usize)
            .ok_or(ServerError::UnknownSegment(sid))?;
        if seg.status != SegmentStatus::Pending {
            return Err(ServerError::Conflict {
                segment: sid,
                status: seg.status,
            });
        }
        seg.status = match action {
            Action::Accept => SegmentStatus::Accepted,
            Action::Reject => SegmentStatus::Rejected,
        };
        Ok(seg.status)
    }

    /// Returns a segment to pending after a failed write.
    pub(super) fn undo_action(&mut self, sid: u64) {
        if let Some(seg) = self.segments.get_mut(sid as usize) {
            seg.status = SegmentStatus::Pending;
        }
    }

    pub(super) fn rewind_cursor(&mut self, position: usize) {
        self.cursor.rewind(position);
    }

    /// Next component with a pending segment, best first.
    pub fn teleport(&mut self) -> Option<TeleportTarget> {
        let segments = &self.segments;
        let component_segments = &self.component_segments;
        let r = self
            .cursor
            .next_unresolved(|k, _| {
                component_segments[k]
                    .iter()
                    .all(|&s| segments[s as usize].status != SegmentStatus::Pending)
            })
            .cloned()?;
        let rank = self.cursor.position() - 1;
        Some(TeleportTarget {
            rank,
            score: r.score,
            area: r.area,
            conn: r.conn,
            bbox: r.bbox,
            segments: self.component_segments[rank].clone(),
        })
    }

    /// Base map with every accepted segment spliced in.
    pub fn export_graph(&self) -> RoadGraph {
        let mut g = self.base.clone();
        for s in self.segments.iter().filter(|s| s.status == SegmentStatus::Accepted) {
            for &v in &s.vertices {
                if !g.contains_vertex(v) {
                    g.insert_vertex(v, self.inferred.pos(v))
                        .expect("inferred vertex is valid");
                }
            }
            for w in s.vertices.windows(2) {
                g.add_edge(w[0], w[1]).expect("segment edges are new");
            }
        }
        g
    }

    pub fn counts(&self) -> StatusCounts {
        let mut c = StatusCounts {
            pending: 0,
            accepted: 0,
            rejected: 0,
        };
        for s in &self.segments {
            match s.status {
                SegmentStatus::Pending => c.pending += 1,
                SegmentStatus::Accepted => c.accepted += 1,
                SegmentStatus::Rejected => c.rejected += 1,
            }
        }
        c
    }
}

/// Splits inferred edges into segments. `major` holds major edges as
/// vertex pairs.
fn segment_inferred(
    inferred: &RoadGraph,
    base: &RoadGraph,
    major: &BTreeSet<(VertexId, VertexId)>,
) -> Vec<Segment> {
    let is_major = |e: EdgeId| {
        let edge = inferred.edge(e).expect("edge exists");
        major.contains(&(edge.a, edge.b))
    };
    let mut breaks: HashSet<VertexId> = inferred
        .vertex_ids()
        .filter(|&v| base.contains_vertex(v))
        .collect();
    for v in inferred.vertex_ids() {
        if let [(_, e1), (_, e2)] = inferred.neighbors(v) {
            if is_major(*e1) != is_major(*e2) {
                breaks.insert(v);
            }
        }
    }
    chains(inferred, &breaks)
        .into_iter()
        .enumerate()
        .map(|(k, vertices)| {
            let pruned = vertices.windows(2).all(|w| {
                let e = inferred.edge_between(w[0], w[1]).expect("chain edge exists");
                is_major(e)
            });
            Segment {
                id: k as u64,
                vertices,
                pruned,
                status: SegmentStatus::Pending,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rasterize_gt_field, FieldGrid};
    use crate::geo::{Frame, Point};

    fn road(points: &[(f64, f64)]) -> RoadGraph {
        let mut g = RoadGraph::new(Frame::default());
        let ids: Vec<_> = points.iter().map(|&(x, y)| g.add_vertex(Point::new(x, y))).collect();
        for w in ids.windows(2) {
            g.add_edge(w[0], w[1]).unwrap();
        }
        g
    }

    /// An L-shaped road whose eastern leg is missing from the base map.
    fn fixture() -> (RoadGraph, DirectionField) {
        let truth = road(&[(0.0, 0.0), (240.0, 0.0), (240.0, 240.0)]);
        let base = road(&[(0.0, 0.0), (240.0, 0.0)]);
        let grid = FieldGrid::covering(truth.bbox().unwrap(), 2.0, 64, 40.0).unwrap();
        (base, rasterize_gt_field(&truth, grid, 12.0, 20.0))
    }

    fn session() -> Session {
        let (base, field) = fixture();
        let params = SessionParams {
            search: SearchParams::new(12.0, 0.5),
            ..SessionParams::default()
        };
        Session::build("t".into(), &base, &field, params).unwrap()
    }

    #[test]
    fn missing_leg_becomes_a_segment() {
        let s = session();
        assert!(!s.segments().is_empty());
        assert_eq!(s.overlay(false).count(), s.segments().len());
        // no pruning pairs at this scale
        assert_eq!(s.overlay(true).count(), 0);
        assert_eq!(s.ranked().len(), 1);
        assert!(s.ranked()[0].conn >= 1);
    }

    #[test]
    fn accept_reject_and_export() {
        let mut s = session();
        assert_eq!(s.export_graph().edge_pairs(), s.base().edge_pairs());
        assert_eq!(s.act(0, Action::Accept).unwrap(), SegmentStatus::Accepted);
        assert!(matches!(
            s.act(0, Action::Reject),
            Err(ServerError::Conflict { segment: 0, .. })
        ));
        assert!(matches!(s.act(999, Action::Accept), Err(ServerError::UnknownSegment(999))));
        let exported = s.export_graph();
        assert_eq!(
            exported.num_edges(),
            s.base().num_edges() + s.segments()[0].num_edges()
        );
        exported.validate().unwrap();
    }

    #[test]
    fn teleport_skips_resolved_components() {
        let mut s = session();
        let ids: Vec<u64> = s.segments().iter().map(|x| x.id).collect();
        for id in ids {
            s.act(id, Action::Reject).unwrap();
        }
        assert!(s.teleport().is_none());
        assert_eq!(s.overlay(false).count(), 0);
    }

    #[test]
    fn zero_field_infers_nothing() {
        let (base, field) = fixture();
        let zero = DirectionField::zeros(*field.grid());
        let s = Session::build("z".into(), &base, &zero, SessionParams::default()).unwrap();
        assert!(s.segments().is_empty());
        assert!(s.clone_teleport_is_none());

        let empty = RoadGraph::new(Frame::default());
        let s = Session::build("e".into(), &empty, &zero, SessionParams::default()).unwrap();
        assert!(s.segments().is_empty());
    }

    #[test]
    fn distant_base_is_a_frame_mismatch() {
        let (_, field) = fixture();
        let far = road(&[(1e6, 1e6), (1e6 + 100.0, 1e6)]);
        assert!(matches!(
            Session::build("f".into(), &far, &field, SessionParams::default()),
            Err(ServerError::FrameMismatch)
        ));
    }

    impl Session {
        fn clone_teleport_is_none(&self) -> bool {
            self.cursor.clone().next_component().is_none()
        }
    }
}
