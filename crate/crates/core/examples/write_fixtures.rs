//! Write the synthetic test maps to disk for use with the command line tool.
//!
//! Produces `city.json` (ground truth), `city_base.json` (the city with 30%
//! of its roads removed) and `barbell.json` in the given directory.
//!
//!     cargo run --example write_fixtures -- fixtures/
//!     mapassist gen-field --graph fixtures/city.json --out fixtures/city.dfl
//!     mapassist infer --field fixtures/city.dfl --base fixtures/city_base.json --out inferred.json

use std::path::PathBuf;

use mapassist::geo::Frame;
use mapassist::io::write_graph;
use mapassist::synth;

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir).unwrap();
    // place the local frame somewhere real so lat/lon exports make sense
    let frame = Frame::new(47.6062, -122.3321).unwrap();

    let mut city = synth::grid_city();
    city.set_frame(frame);
    let (mut base, _) = synth::remove_edges(&city, 0.3, 7);
    base.set_frame(frame);
    let mut barbell = synth::barbell(500.0, 50.0, 6000.0, 250.0).graph;
    barbell.set_frame(frame);

    for (name, g) in [("city.json", &city), ("city_base.json", &base), ("barbell.json", &barbell)] {
        let path = dir.join(name);
        write_graph(g, &path).unwrap();
        println!("{}: {} vertices, {} edges", path.display(), g.num_vertices(), g.num_edges());
    }
}
