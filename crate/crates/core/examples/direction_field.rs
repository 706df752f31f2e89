//! Ground-truth direction labels and the field built from them.
//!
//! Prints the road directions seen from a few points around a junction,
//! then rasterizes a small graph, saves it, reads it back and lists the
//! strongest seed peaks.
//!
//!     cargo run --example direction_field

use mapassist::field::{
    bucketize, compute_gt_angles, extract_peaks, rasterize_gt_field, read_field, write_field,
    FieldGrid,
};
use mapassist::geo::Point;
use mapassist::synth;

fn main() {
    // a plus-shaped junction at (100, 100)
    let g = synth::grid(3, 100.0, Point::new(0.0, 0.0));
    for p in [
        Point::new(100.0, 100.0),
        Point::new(150.0, 100.0),
        Point::new(150.0, 108.0),
        Point::new(150.0, 150.0),
    ] {
        let angles = compute_gt_angles(&g, p, 12.0, 20.0);
        let degrees: Vec<String> = angles.0.iter().map(|a| format!("{:.1}", a.to_degrees())).collect();
        let bits = bucketize(&angles, 64);
        let set: Vec<usize> = (0..64).filter(|&k| bits[k]).collect();
        println!("({:>5.1}, {:>5.1}): angles [{}] -> buckets {:?}", p.x, p.y, degrees.join(", "), set);
    }

    let grid = FieldGrid::covering(g.bbox().unwrap(), 2.0, 64, 20.0).unwrap();
    let field = rasterize_gt_field(&g, grid, 12.0, 20.0);
    let path = std::env::temp_dir().join("direction_field_example.dfl");
    write_field(&field, &path).unwrap();
    let back = read_field(&path).unwrap();
    assert_eq!(back.values(), field.values());
    println!(
        "field {}x{}x{}, {} labelled cells, {} bytes on disk",
        grid.width,
        grid.height,
        grid.buckets,
        field.nonzero_cells(),
        std::fs::metadata(&path).unwrap().len()
    );

    let peaks = extract_peaks(&back, 0.5, 24.0);
    println!("{} peaks; first five:", peaks.len());
    for p in peaks.iter().take(5) {
        println!("  ({:.1}, {:.1}) value {}", p.point.x, p.point.y, p.value);
    }
}
