//! Extend an incomplete map.
//!
//! Removes 30% of the test city's roads, then searches outward from the
//! remaining map over the full ground-truth field and reports how much of
//! the removed road length the inferred segments recover.
//!
//!     cargo run --release --example extend_map

use mapassist::field::{rasterize_gt_field, FieldGrid};
use mapassist::metrics::{rge, sample_along};
use mapassist::search::{SearchParams, SearchState};
use mapassist::spatial::SegmentIndex;
use mapassist::synth;

fn main() {
    let truth = synth::grid_city();
    let (base, removed) = synth::remove_edges(&truth, 0.3, 7);
    let grid = FieldGrid::covering(truth.bbox().unwrap(), 2.0, 64, 40.0).unwrap();
    let field = rasterize_gt_field(&truth, grid, 12.0, 20.0);

    let state = SearchState::from_basemap(&field, &base, SearchParams::new(12.0, 0.5)).unwrap();
    let out = state.run();
    let inferred = out.inferred();
    println!(
        "base {} edges, removed {} edges ({:.0} m); inferred {} edges; {:?}",
        base.num_edges(),
        removed.num_edges(),
        removed.total_length(),
        inferred.num_edges(),
        out.stats
    );

    let index = SegmentIndex::new(&inferred, 20.0);
    let samples = sample_along(&removed, 1.0);
    let hit = samples
        .iter()
        .filter(|&&p| index.nearest_within(p, 20.0).is_some())
        .count();
    println!(
        "recovered {:.1}% of removed length within 20 m",
        100.0 * hit as f64 / samples.len() as f64
    );
    if inferred.num_edges() > 0 {
        let r = rge(&inferred, &truth, 5.0).unwrap();
        println!("inferred RGE {:.2} m (max {:.2} m)", r.rge, r.max_rge);
    }
    let shared = inferred.edge_pairs().intersection(&base.edge_pairs()).count();
    println!("edges shared with the base map: {shared}");
    if let Ok(path) = std::env::var("DUMP") {
        mapassist::io::write_graph(&out.graph, path).unwrap();
    }
}
