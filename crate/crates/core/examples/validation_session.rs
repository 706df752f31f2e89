//! A validation session without the HTTP layer.
//!
//! Creates a persisted session over a partial map, teleports to the best
//! component, accepts its segments, rejects one elsewhere, reopens the
//! store as if after a restart and exports the edited map.
//!
//!     cargo run --release --example validation_session

use mapassist::field::{rasterize_gt_field, FieldGrid};
use mapassist::search::SearchParams;
use mapassist::server::{Action, SessionParams, SessionStore};
use mapassist::synth;

fn main() {
    let truth = synth::grid_city();
    let (base, _) = synth::remove_edges(&truth, 0.3, 7);
    let grid = FieldGrid::covering(truth.bbox().unwrap(), 2.0, 64, 40.0).unwrap();
    let field = rasterize_gt_field(&truth, grid, 12.0, 20.0);
    let params = SessionParams {
        search: SearchParams::new(12.0, 0.5),
        ..SessionParams::default()
    };

    let dir = tempfile_dir();
    let store = SessionStore::open(&dir).unwrap();
    let id = store.create(&base, &field, params).unwrap();
    let (n, pruned) = store
        .read(&id, |s| (s.overlay(false).count(), s.overlay(true).count()))
        .unwrap();
    println!("session {id}: {n} segments, {pruned} after pruning");

    let target = store.teleport(&id).unwrap().expect("something to validate");
    println!(
        "teleport -> component #{} ({} segments, conn {}, area {:.0} m²)",
        target.rank,
        target.segments.len(),
        target.conn,
        target.area
    );
    for &sid in &target.segments {
        store.act(&id, sid, Action::Accept).unwrap();
    }
    let other = store
        .read(&id, |s| s.overlay(false).find(|x| x.status == mapassist::server::SegmentStatus::Pending).map(|x| x.id))
        .unwrap();
    if let Some(sid) = other {
        store.act(&id, sid, Action::Reject).unwrap();
    }
    if let Err(e) = store.act(&id, target.segments[0], Action::Reject) {
        println!("second action on a segment: {e}");
    }
    drop(store);

    let store = SessionStore::open(&dir).unwrap();
    let (counts, exported, base_edges) = store
        .read(&id, |s| (s.counts(), s.export_graph(), s.base().num_edges()))
        .unwrap();
    println!("after restart: {counts:?}");
    println!(
        "export: {} edges = {} base + {} accepted",
        exported.num_edges(),
        base_edges,
        exported.num_edges() - base_edges
    );
    std::fs::remove_dir_all(&dir).ok();
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("mapassist-session-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
