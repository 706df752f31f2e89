//! TOPO and road geometry error on controlled distortions.
//!
//! Compares the test city against itself, against a copy shifted sideways,
//! and against a copy with roads removed.
//!
//!     cargo run --release --example evaluate

use mapassist::geo::Point;
use mapassist::metrics::{rge, topo_compare, TopoParams};
use mapassist::synth;
use mapassist::RoadGraph;

fn shifted(g: &RoadGraph, d: Point) -> RoadGraph {
    let mut out = g.empty_like();
    for (v, p) in g.vertices() {
        out.insert_vertex(v, p + d).unwrap();
    }
    for (_, e) in g.edges() {
        out.add_edge(e.a, e.b).unwrap();
    }
    out
}

fn main() {
    let truth = synth::grid(11, 100.0, Point::default());
    let params = TopoParams::default();
    let (partial, _) = synth::remove_edges(&truth, 0.3, 1);
    let cases = [
        ("identical", truth.clone()),
        ("shifted 5 m", shifted(&truth, Point::new(5.0, 5.0))),
        ("shifted 20 m", shifted(&truth, Point::new(20.0, 20.0))),
        ("30% removed", partial),
    ];
    println!("{:<14} {:>9} {:>7} {:>8} {:>8}", "case", "precision", "recall", "rge", "max_rge");
    for (name, g) in &cases {
        let t = topo_compare(g, &truth, &params).unwrap();
        let r = rge(g, &truth, 5.0).unwrap();
        println!(
            "{:<14} {:>9.3} {:>7.3} {:>8.2} {:>8.2}",
            name, t.precision, t.recall, r.rge, r.max_rge
        );
    }
}
