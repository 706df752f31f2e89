//! Per-cell road-direction fields.
//!
//! A [`DirectionField`] stores, for each cell of a georeferenced grid, a
//! vector of `b` likelihoods; bucket `k` covers road directions in
//! `[2πk/b, 2π(k+1)/b)` measured counter-clockwise from east. Ground-truth
//! fields are produced from a road graph by [`rasterize_gt_field`]; a
//! trained model emits the same layout through the `dirfield` file format
//! (see [`write_field`]).
//!
//! Cell `(i, j)` has its center at `origin + (i, j) * cell_size`, so `i`
//! runs east and `j` runs north.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::geo::{BBox, Point};
use crate::graph::{points_at_distances, RoadGraph};
use crate::spatial::{PointIndex, SegmentIndex};

pub const DEFAULT_BUCKETS: usize = 64;
pub const DEFAULT_CELL_SIZE: f64 = 2.0;
pub const DEFAULT_LABEL_DISTANCE: f64 = 12.0;
pub const DEFAULT_MATCH_THRESH: f64 = 20.0;

const MAGIC: &[u8; 4] = b"DFL1";
const HEADER_LEN: usize = 4 + 3 * 4 + 3 * 8;

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error("bad magic {0:?}, expected \"DFL1\"")]
    BadMagic([u8; 4]),
    #[error("invalid dimensions w={w} h={h} b={b} cell_size={cell_size}")]
    Dimension {
        w: u64,
        h: u64,
        b: u64,
        cell_size: f64,
    },
    #[error("payload is {actual} bytes, header implies {expected}")]
    PayloadSize { expected: u64, actual: u64 },
    #[error("value {value} at index {index} outside [0, 1]")]
    ValueRange { index: usize, value: f32 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl FieldError {
    /// Stable numeric code per failure class, used as the CLI exit status.
    pub fn code(&self) -> i32 {
        match self {
            FieldError::BadMagic(_) => 10,
            FieldError::Dimension { .. } => 11,
            FieldError::PayloadSize { .. } => 12,
            FieldError::ValueRange { .. } => 13,
            FieldError::Io(_) => 14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGrid {
    pub width: usize,
    pub height: usize,
    pub buckets: usize,
    pub cell_size: f64,
    /// Center of cell (0, 0).
    pub origin: Point,
}

impl FieldGrid {
    pub fn new(
        width: usize,
        height: usize,
        buckets: usize,
        cell_size: f64,
        origin: Point,
    ) -> Result<Self, FieldError> {
        if width == 0
            || height == 0
            || buckets == 0
            || !buckets.is_multiple_of(2)
            || !(cell_size > 0.0 && cell_size.is_finite())
            || !origin.is_finite()
        {
            return Err(FieldError::Dimension {
                w: width as u64,
                h: height as u64,
                b: buckets as u64,
                cell_size,
            });
        }
        Ok(FieldGrid {
            width,
            height,
            buckets,
            cell_size,
            origin,
        })
    }

    /// Smallest grid whose cells cover `bbox` grown by `margin` meters.
    pub fn covering(bbox: BBox, cell_size: f64, buckets: usize, margin: f64) -> Result<Self, FieldError> {
        let bb = bbox.padded(margin);
        let width = ((bb.max.x - bb.min.x) / cell_size).ceil() as usize + 1;
        let height = ((bb.max.y - bb.min.y) / cell_size).ceil() as usize + 1;
        FieldGrid::new(width, height, buckets, cell_size, bb.min)
    }

    pub fn num_cells(&self) -> usize {
        self.width * self.height
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + i as f64 * self.cell_size,
            self.origin.y + j as f64 * self.cell_size,
        )
    }

    /// Cell whose center is nearest to `p`, or `None` outside the grid.
    pub fn nearest_cell(&self, p: Point) -> Option<(usize, usize)> {
        let fi = ((p.x - self.origin.x) / self.cell_size).round();
        let fj = ((p.y - self.origin.y) / self.cell_size).round();
        if fi < 0.0 || fj < 0.0 || fi >= self.width as f64 || fj >= self.height as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }

    pub fn extent(&self) -> BBox {
        let half = self.cell_size / 2.0;
        BBox {
            min: Point::new(self.origin.x - half, self.origin.y - half),
            max: Point::new(
                self.origin.x + (self.width as f64 - 0.5) * self.cell_size,
                self.origin.y + (self.height as f64 - 0.5) * self.cell_size,
            ),
        }
    }

    /// Bucket containing `angle` (radians, any range).
    pub fn bucket_of(&self, angle: f64) -> usize {
        bucket_of(angle, self.buckets)
    }

    /// Center angle of bucket `k`.
    pub fn bucket_center(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * TAU / self.buckets as f64
    }
}

pub fn bucket_of(angle: f64, buckets: usize) -> usize {
    let a = crate::geo::normalize_angle(angle);
    ((a * buckets as f64 / TAU).floor() as usize).min(buckets - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionField {
    grid: FieldGrid,
    values: Vec<f32>,
}

impl DirectionField {
    pub fn zeros(grid: FieldGrid) -> Self {
        DirectionField {
            values: vec![0.0; grid.num_cells() * grid.buckets],
            grid,
        }
    }

    pub fn from_values(grid: FieldGrid, values: Vec<f32>) -> Result<Self, FieldError> {
        let expected = grid.num_cells() * grid.buckets;
        if values.len() != expected {
            return Err(FieldError::PayloadSize {
                expected: (expected * 4) as u64,
                actual: (values.len() * 4) as u64,
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(FieldError::ValueRange { index, value });
        }
        Ok(DirectionField { grid, values })
    }

    pub fn grid(&self) -> &FieldGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        (i * self.grid.height + j) * self.grid.buckets
    }

    pub fn cell(&self, i: usize, j: usize) -> &[f32] {
        let o = self.offset(i, j);
        &self.values[o..o + self.grid.buckets]
    }

    /// Sets one cell's vector; values are clamped into `[0, 1]`.
    pub fn set_cell(&mut self, i: usize, j: usize, v: &[f32]) {
        assert_eq!(v.len(), self.grid.buckets);
        let o = self.offset(i, j);
        for (dst, &src) in self.values[o..o + v.len()].iter_mut().zip(v) {
            *dst = src.clamp(0.0, 1.0);
        }
    }

    /// Likelihood vector at the cell nearest `p`; zeros outside the grid.
    pub fn lookup(&self, p: Point) -> Vec<f32> {
        match self.grid.nearest_cell(p) {
            Some((i, j)) => self.cell(i, j).to_vec(),
            None => vec![0.0; self.grid.buckets],
        }
    }

    /// `max_k U[i, j, k]`.
    pub fn cell_max(&self, i: usize, j: usize) -> f32 {
        self.cell(i, j).iter().copied().fold(0.0, f32::max)
    }

    pub fn nonzero_cells(&self) -> usize {
        self.values
            .chunks(self.grid.buckets)
            .filter(|c| c.iter().any(|&v| v > 0.0))
            .count()
    }
}

/// Directions (radians in `[0, 2π)`) from a cell center toward road points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AngleSet(pub Vec<f64>);

impl AngleSet {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

fn angles_from(
    g: &RoadGraph,
    index: &SegmentIndex,
    center: Point,
    distance: f64,
    match_thresh: f64,
) -> AngleSet {
    let Some((pos, _)) = index.nearest_within(center, match_thresh) else {
        return AngleSet::default();
    };
    let angles = points_at_distances(g, &pos, &[distance])
        .into_iter()
        .filter_map(|(_, q)| {
            let v = q - center;
            (v.norm() > 0.0).then(|| v.angle())
        })
        .collect();
    AngleSet(angles)
}

fn index_cell(distance: f64, match_thresh: f64) -> f64 {
    distance.max(match_thresh)
}

/// Ground-truth direction set at one position: project onto the nearest
/// edge (if within `match_thresh`), then take the angle toward every point
/// exactly `distance` along the graph from that projection.
pub fn compute_gt_angles(g: &RoadGraph, center: Point, distance: f64, match_thresh: f64) -> AngleSet {
    assert!(distance > 0.0 && match_thresh > 0.0);
    let index = SegmentIndex::new(g, index_cell(distance, match_thresh));
    angles_from(g, &index, center, distance, match_thresh)
}

/// Bit `k` is set iff some angle falls in bucket `k`.
pub fn bucketize(angles: &AngleSet, buckets: usize) -> Vec<bool> {
    assert!(buckets > 0);
    let mut bits = vec![false; buckets];
    for &a in &angles.0 {
        bits[bucket_of(a, buckets)] = true;
    }
    bits
}

/// Ground-truth field: each cell gets the bucketized angle set at its center.
pub fn rasterize_gt_field(
    g: &RoadGraph,
    grid: FieldGrid,
    distance: f64,
    match_thresh: f64,
) -> DirectionField {
    assert!(distance > 0.0 && match_thresh > 0.0);
    let mut field = DirectionField::zeros(grid);
    if g.num_edges() == 0 {
        return field;
    }
    let index = SegmentIndex::new(g, index_cell(distance, match_thresh));
    let column = grid.height * grid.buckets;
    field
        .values
        .par_chunks_mut(column)
        .enumerate()
        .for_each(|(i, col)| {
            for j in 0..grid.height {
                let angles = angles_from(g, &index, grid.cell_center(i, j), distance, match_thresh);
                let cell = &mut col[j * grid.buckets..(j + 1) * grid.buckets];
                for (dst, bit) in cell.iter_mut().zip(bucketize(&angles, grid.buckets)) {
                    if bit {
                        *dst = 1.0;
                    }
                }
            }
        });
    field
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub point: Point,
    pub value: f32,
    pub cell: (usize, usize),
}

/// Seed candidates from `m(U) = max_k U`: 8-neighborhood local maxima with
/// value at least `t_init`, thinned by greedy non-maximum suppression.
/// Returned strongest first; equal values keep cell order (`i` then `j`).
pub fn extract_peaks(f: &DirectionField, t_init: f32, nms_radius: f64) -> Vec<Peak> {
    assert!(t_init > 0.0 && t_init <= 1.0);
    let g = f.grid;
    let m: Vec<f32> = (0..g.num_cells())
        .map(|c| f.cell_max(c / g.height, c % g.height))
        .collect();
    let at = |i: usize, j: usize| m[i * g.height + j];
    let mut cands: Vec<(usize, usize, f32)> = Vec::new();
    for i in 0..g.width {
        for j in 0..g.height {
            let v = at(i, j);
            if v < t_init {
                continue;
            }
            let mut is_max = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0)
                        || ni < 0
                        || nj < 0
                        || ni >= g.width as i64
                        || nj >= g.height as i64
                    {
                        continue;
                    }
                    if at(ni as usize, nj as usize) > v {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                cands.push((i, j, v));
            }
        }
    }
    cands.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut kept = Vec::new();
    let mut index = PointIndex::new(nms_radius.max(g.cell_size));
    for (i, j, value) in cands {
        let p = g.cell_center(i, j);
        if nms_radius > 0.0 && !index.within(p, nms_radius).is_empty() {
            continue;
        }
        index.insert(crate::graph::VertexId(kept.len() as u64), p);
        kept.push(Peak {
            point: p,
            value,
            cell: (i, j),
        });
    }
    kept
}

/// Serializes a field in the `dirfield v1` little-endian layout.
pub fn encode_field<W: Write>(f: &DirectionField, mut w: W) -> io::Result<()> {
    let g = &f.grid;
    w.write_all(MAGIC)?;
    for n in [g.width, g.height, g.buckets] {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    for x in [g.cell_size, g.origin.x, g.origin.y] {
        w.write_all(&x.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(f.values.len().min(1 << 20) * 4);
    for chunk in f.values.chunks(1 << 20) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()
}

pub fn decode_field<R: Read>(mut r: R) -> Result<DirectionField, FieldError> {
    let mut header = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        let n = r.read(&mut header[got..])?;
        if n == 0 {
            break;
        }
        got += n;
    }
    if got < 4 || &header[..4] != MAGIC {
        let mut magic = [0u8; 4];
        magic[..got.min(4)].copy_from_slice(&header[..got.min(4)]);
        return Err(FieldError::BadMagic(magic));
    }
    if got < HEADER_LEN {
        return Err(FieldError::PayloadSize {
            expected: HEADER_LEN as u64,
            actual: got as u64,
        });
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap()) as usize;
    let f64_at = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let (w, h, b) = (u32_at(4), u32_at(8), u32_at(12));
    let (cell, ox, oy) = (f64_at(16), f64_at(24), f64_at(32));
    let grid = FieldGrid::new(w, h, b, cell, Point::new(ox, oy))?;
    let expected = (w as u64) * (h as u64) * (b as u64) * 4;
    let mut payload = Vec::new();
    // read one byte past the expected size to detect trailing data
    r.take(expected + 1).read_to_end(&mut payload)?;
    if payload.len() as u64 != expected {
        return Err(FieldError::PayloadSize {
            expected,
            actual: payload.len() as u64,
        });
    }
    let values = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DirectionField::from_values(grid, values)
}

pub fn write_field(f: &DirectionField, path: impl AsRef<Path>) -> Result<(), FieldError> {
    encode_field(f, BufWriter::new(File::create(path)?))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<DirectionField, FieldError> {
    decode_field(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Frame;
    use std::f64::consts::PI;

    fn road(points: &[(f64, f64)]) -> RoadGraph {
        let mut g = RoadGraph::new(Frame::default());
        let ids: Vec<_> = points
            .iter()
            .map(|&(x, y)| g.add_vertex(Point::new(x, y)))
            .collect();
        for w in ids.windows(2) {
            g.add_edge(w[0], w[1]).unwrap();
        }
        g
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn gt_angles_far_from_road_is_empty() {
        let g = road(&[(-50.0, 0.0), (50.0, 0.0)]);
        assert!(compute_gt_angles(&g, Point::new(0.0, 50.0), 12.0, 20.0).is_empty());
    }

    #[test]
    fn gt_angles_on_through_road() {
        let g = road(&[(-50.0, 0.0), (50.0, 0.0)]);
        let a = sorted(compute_gt_angles(&g, Point::new(0.0, 0.0), 12.0, 20.0).0);
        assert_eq!(a, vec![0.0, PI]);
    }

    #[test]
    fn gt_angles_above_road() {
        let g = road(&[(-50.0, 0.0), (50.0, 0.0)]);
        let a = sorted(compute_gt_angles(&g, Point::new(0.0, 5.0), 12.0, 20.0).0);
        // atan2(-5, -12) and atan2(-5, 12), wrapped into [0, 2π)
        let want = sorted(vec![(-5.0f64).atan2(-12.0) + TAU, (-5.0f64).atan2(12.0) + TAU]);
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&want) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((a[0] - 3.536).abs() < 1e-3 && (a[1] - 5.889).abs() < 1e-3);
    }

    #[test]
    fn bucketize_examples() {
        let bits = bucketize(&AngleSet(vec![0.0]), 64);
        assert!(bits[0] && bits.iter().filter(|&&b| b).count() == 1);
        let bits = bucketize(&AngleSet(vec![PI]), 64);
        assert!(bits[32] && bits.iter().filter(|&&b| b).count() == 1);
        let bits = bucketize(&AngleSet(vec![5.889, 3.536]), 64);
        let set: Vec<usize> = (0..64).filter(|&k| bits[k]).collect();
        // floor(angle * 64 / 2π)
        assert_eq!(set, vec![36, 59]);
        // upper boundary belongs to the next bucket
        assert_eq!(bucket_of(TAU / 64.0, 64), 1);
        assert_eq!(bucket_of(TAU - 1e-12, 64), 63);
    }

    #[test]
    fn grid_rejects_bad_dimensions() {
        assert!(matches!(
            FieldGrid::new(0, 0, 64, 2.0, Point::default()),
            Err(FieldError::Dimension { .. })
        ));
        assert!(FieldGrid::new(4, 4, 63, 2.0, Point::default()).is_err());
        assert!(FieldGrid::new(4, 4, 64, 0.0, Point::default()).is_err());
    }

    #[test]
    fn nearest_cell_and_lookup() {
        let grid = FieldGrid::new(10, 5, 8, 2.0, Point::new(100.0, 200.0)).unwrap();
        assert_eq!(grid.nearest_cell(Point::new(100.9, 200.0)), Some((0, 0)));
        assert_eq!(grid.nearest_cell(Point::new(101.1, 203.0)), Some((1, 2)));
        assert_eq!(grid.nearest_cell(Point::new(98.9, 200.0)), None);
        assert_eq!(grid.nearest_cell(Point::new(100.0, 209.1)), None);
        let mut f = DirectionField::zeros(grid);
        f.set_cell(1, 2, &[0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(f.lookup(Point::new(102.0, 204.0))[7], 1.0);
        assert_eq!(f.lookup(Point::new(0.0, 0.0)), vec![0.0; 8]);
    }

    #[test]
    fn empty_graph_rasterizes_to_zeros() {
        let grid = FieldGrid::new(8, 8, 64, 2.0, Point::default()).unwrap();
        let f = rasterize_gt_field(&RoadGraph::default(), grid, 12.0, 20.0);
        assert_eq!(f.nonzero_cells(), 0);
    }

    #[test]
    fn peaks_examples() {
        let grid = FieldGrid::new(20, 20, 4, 1.0, Point::default()).unwrap();
        let mut f = DirectionField::zeros(grid);
        assert!(extract_peaks(&f, 0.5, 12.0).is_empty());
        f.set_cell(3, 4, &[0.0, 1.0, 0.0, 0.0]);
        let peaks = extract_peaks(&f, 0.5, 12.0);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].point, Point::new(3.0, 4.0));
        // second, weaker peak 5 m away is suppressed
        f.set_cell(8, 4, &[0.8, 0.0, 0.0, 0.0]);
        let peaks = extract_peaks(&f, 0.5, 12.0);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].value, 1.0);
        let peaks = extract_peaks(&f, 0.5, 4.0);
        assert_eq!(peaks.len(), 2);
        assert!(peaks[0].value >= peaks[1].value);
    }

    #[test]
    fn decode_errors_are_distinct() {
        let grid = FieldGrid::new(3, 2, 4, 2.0, Point::new(1.0, 2.0)).unwrap();
        let mut f = DirectionField::zeros(grid);
        f.set_cell(2, 1, &[0.25, 1.0, 0.0, 0.5]);
        let mut bytes = Vec::new();
        encode_field(&f, &mut bytes).unwrap();
        assert_eq!(decode_field(bytes.as_slice()).unwrap(), f);

        let truncated = &bytes[..bytes.len() - 3];
        assert!(matches!(decode_field(truncated), Err(FieldError::PayloadSize { .. })));

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_field(bad.as_slice()), Err(FieldError::BadMagic(_))));

        let mut zero = bytes.clone();
        zero[4..12].fill(0);
        assert!(matches!(decode_field(zero.as_slice()), Err(FieldError::Dimension { .. })));

        let mut out_of_range = bytes.clone();
        let last = out_of_range.len() - 4;
        out_of_range[last..].copy_from_slice(&1.5f32.to_le_bytes());
        let err = decode_field(out_of_range.as_slice()).unwrap_err();
        assert!(matches!(err, FieldError::ValueRange { .. }));

        let codes: Vec<i32> = [
            decode_field(truncated).unwrap_err(),
            decode_field(bad.as_slice()).unwrap_err(),
            decode_field(zero.as_slice()).unwrap_err(),
            err,
        ]
        .iter()
        .map(FieldError::code)
        .collect();
        let mut uniq = codes.clone();
        uniq.dedup();
        assert_eq!(uniq.len(), 4);
    }
}
