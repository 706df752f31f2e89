//! Keep only the major roads of a barbell-shaped network.
//!
//! Two dense 500 m street grids sit 6 km apart with one long road between
//! them. Pruning keeps the middle of the connecting road and drops the
//! local streets, while plain edge betweenness is shown for comparison on
//! a three-edge path.
//!
//!     cargo run --release --example prune_barbell

use std::time::Instant;

use mapassist::prune::{betweenness, grid_cluster, prune_major, PruneParams};
use mapassist::synth;

fn main() {
    let fixture = synth::barbell(500.0, 50.0, 6000.0, 250.0);
    let g = &fixture.graph;
    let params = PruneParams::default();

    let t = Instant::now();
    let centers = grid_cluster(g, &params);
    let out = prune_major(g, &centers, &params).expect("valid parameters");
    println!(
        "{} vertices, {} edges, {:.0} m of road; {} cluster centers; pruned in {:.2?}",
        g.num_vertices(),
        g.num_edges(),
        g.total_length(),
        centers.len(),
        t.elapsed()
    );
    let on_connector = out.major.iter().filter(|e| fixture.connector.contains(e)).count();
    println!(
        "kept {} edges ({:.0} m): {} of {} connector pieces, {} street edges",
        out.major.len(),
        out.graph.total_length(),
        on_connector,
        fixture.connector.len(),
        out.major.len() - on_connector
    );

    let path = synth::path(4);
    let g_path: Vec<u64> = betweenness(&path).into_values().collect();
    println!("betweenness on a 4-vertex path: {g_path:?}");
}
