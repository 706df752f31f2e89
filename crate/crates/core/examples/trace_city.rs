//! Trace a synthetic city from its ground-truth direction field.
//!
//! Rasterizes the 2 km test grid into a direction field, seeds the search
//! from field peaks, traces the network and scores it with TOPO.
//!
//!     cargo run --release --example trace_city

use std::time::Instant;

use mapassist::field::{extract_peaks, rasterize_gt_field, FieldGrid};
use mapassist::metrics::{rge, topo_compare, TopoParams};
use mapassist::search::{SearchParams, SearchState};
use mapassist::synth;

fn main() {
    let truth = synth::grid_city();
    let t0 = Instant::now();
    let grid = FieldGrid::covering(truth.bbox().unwrap(), 2.0, 64, 40.0).unwrap();
    let field = rasterize_gt_field(&truth, grid, 12.0, 20.0);
    println!(
        "field {}x{} cells, {} labelled, {:.2?}",
        grid.width,
        grid.height,
        field.nonzero_cells(),
        t0.elapsed()
    );

    let t1 = Instant::now();
    let peaks = extract_peaks(&field, 0.5, 24.0);
    let seeds: Vec<_> = peaks.iter().map(|p| p.point).collect();
    let state = SearchState::from_seeds(&field, &seeds, truth.frame(), SearchParams::new(12.0, 0.5))
        .expect("field has peaks");
    let out = state.run();
    println!(
        "{} seeds -> {} vertices, {} edges; {:?}; {:.2?}",
        seeds.len(),
        out.graph.num_vertices(),
        out.graph.num_edges(),
        out.stats,
        t1.elapsed()
    );

    if let Ok(path) = std::env::var("DUMP") {
        mapassist::io::write_graph(&out.graph, path).unwrap();
    }
    let t2 = Instant::now();
    let topo = topo_compare(&out.graph, &truth, &TopoParams::default()).unwrap();
    let geom = rge(&out.graph, &truth, 5.0).unwrap();
    println!(
        "TOPO precision {:.4} recall {:.4}; RGE {:.2} m (max {:.2} m); {:.2?}",
        topo.precision,
        topo.recall,
        geom.rge,
        geom.max_rge,
        t2.elapsed()
    );
}
