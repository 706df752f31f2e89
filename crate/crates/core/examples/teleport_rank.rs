//! Rank unmapped road groups for teleport validation.
//!
//! Extends a partial map, splits the inferred roads into connected
//! components, scores them by hull area plus connections to the map, and
//! walks the teleport cursor through them.
//!
//!     cargo run --release --example teleport_rank

use mapassist::field::{rasterize_gt_field, FieldGrid};
use mapassist::search::{SearchParams, SearchState};
use mapassist::synth;
use mapassist::teleport::{score_components, TeleportCursor, DEFAULT_LAMBDA};

fn main() {
    let truth = synth::grid_city();
    let (base, _) = synth::remove_edges(&truth, 0.3, 7);
    let grid = FieldGrid::covering(truth.bbox().unwrap(), 2.0, 64, 40.0).unwrap();
    let field = rasterize_gt_field(&truth, grid, 12.0, 20.0);
    let out = SearchState::from_basemap(&field, &base, SearchParams::new(12.0, 0.5))
        .unwrap()
        .run();
    let inferred = out.inferred();

    for lambda in [0.0, DEFAULT_LAMBDA] {
        let ranked = score_components(&inferred, &base, lambda);
        println!("lambda = {lambda}: {} components", ranked.len());
        let mut cursor = TeleportCursor::new(ranked);
        let mut k = 0;
        while let Some(c) = cursor.next_component() {
            if k < 5 {
                println!(
                    "  #{k}: score {:>12.0}  area {:>9.0} m²  conn {:>3}  {} vertices, view ({:.0}, {:.0})-({:.0}, {:.0})",
                    c.score,
                    c.area,
                    c.conn,
                    c.component.num_vertices(),
                    c.bbox.min.x,
                    c.bbox.min.y,
                    c.bbox.max.x,
                    c.bbox.max.y
                );
            }
            k += 1;
        }
        println!("  cursor exhausted after {k} teleports");
    }
}
