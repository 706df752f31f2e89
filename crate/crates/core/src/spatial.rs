//! Uniform-grid spatial indexes over graph edges and vertices.

use std::collections::HashMap;

use crate::geo::{self, Point};
use crate::graph::{EdgeId, GraphPosition, RoadGraph, VertexId};

type Bin = (i64, i64);

fn bin_of(p: Point, cell: f64) -> Bin {
    ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
}

/// Edge index for nearest-edge and radius queries.
#[derive(Debug, Clone)]
pub struct SegmentIndex {
    cell: f64,
    bins: HashMap<Bin, Vec<EdgeId>>,
    extent: Option<(Bin, Bin)>,
    segments: HashMap<EdgeId, (Point, Point)>,
}

impl SegmentIndex {
    pub fn new(g: &RoadGraph, cell: f64) -> Self {
        assert!(cell > 0.0);
        let mut bins: HashMap<Bin, Vec<EdgeId>> = HashMap::new();
        let mut segments = HashMap::with_capacity(g.num_edges());
        let mut extent: Option<(Bin, Bin)> = None;
        for e in g.edge_ids() {
            let (a, b) = g.edge_points(e);
            segments.insert(e, (a, b));
            let lo = bin_of(Point::new(a.x.min(b.x), a.y.min(b.y)), cell);
            let hi = bin_of(Point::new(a.x.max(b.x), a.y.max(b.y)), cell);
            extent = Some(match extent {
                None => (lo, hi),
                Some((elo, ehi)) => (
                    (elo.0.min(lo.0), elo.1.min(lo.1)),
                    (ehi.0.max(hi.0), ehi.1.max(hi.1)),
                ),
            });
            for i in lo.0..=hi.0 {
                for j in lo.1..=hi.1 {
                    // skip bins the segment does not actually pass near
                    let center = Point::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
                    if geo::segment_distance(center, a, b) <= cell * std::f64::consts::FRAC_1_SQRT_2 + 1e-9
                    {
                        bins.entry((i, j)).or_default().push(e);
                    }
                }
            }
        }
        for v in bins.values_mut() {
            v.sort_unstable();
        }
        SegmentIndex {
            cell,
            bins,
            extent,
            segments,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    fn scan(&self, p: Point, bins: impl Iterator<Item = Bin>, best: &mut Option<(EdgeId, f64, f64)>) {
        for b in bins {
            let Some(list) = self.bins.get(&b) else { continue };
            for &e in list {
                let (a, bb) = self.segments[&e];
                let (t, d) = geo::project_to_segment(p, a, bb);
                let better = match *best {
                    None => true,
                    Some((be, _, bd)) => d < bd || (d == bd && e < be),
                };
                if better {
                    *best = Some((e, t, d));
                }
            }
        }
    }

    fn to_position(&self, (e, t, d): (EdgeId, f64, f64)) -> (GraphPosition, f64) {
        let (a, b) = self.segments[&e];
        (
            GraphPosition {
                edge: e,
                t,
                point: a.lerp(b, t),
            },
            d,
        )
    }

    /// Nearest edge position within `radius`, ties to the lowest edge id.
    pub fn nearest_within(&self, p: Point, radius: f64) -> Option<(GraphPosition, f64)> {
        let lo = bin_of(Point::new(p.x - radius, p.y - radius), self.cell);
        let hi = bin_of(Point::new(p.x + radius, p.y + radius), self.cell);
        let mut best = None;
        self.scan(
            p,
            (lo.0..=hi.0).flat_map(|i| (lo.1..=hi.1).map(move |j| (i, j))),
            &mut best,
        );
        best.filter(|&(_, _, d)| d <= radius)
            .map(|b| self.to_position(b))
    }

    /// Nearest edge position anywhere, ties to the lowest edge id.
    pub fn nearest(&self, p: Point) -> Option<(GraphPosition, f64)> {
        let (elo, ehi) = self.extent?;
        let c = bin_of(p, self.cell);
        // number of rings needed to cover the whole extent from c
        let max_ring = [
            (c.0 - elo.0).abs(),
            (c.0 - ehi.0).abs(),
            (c.1 - elo.1).abs(),
            (c.1 - ehi.1).abs(),
        ]
        .into_iter()
        .max()
        .unwrap();
        let mut best = None;
        for k in 0..=max_ring {
            let ring = (c.0 - k..=c.0 + k)
                .flat_map(move |i| (c.1 - k..=c.1 + k).map(move |j| (i, j)))
                .filter(move |&(i, j)| (i - c.0).abs() == k || (j - c.1).abs() == k);
            self.scan(p, ring, &mut best);
            // bins beyond ring k are at least k cells away from p
            if let Some((_, _, d)) = best {
                if d <= k as f64 * self.cell {
                    break;
                }
            }
        }
        best.map(|b| self.to_position(b))
    }

    /// Distance from `p` to the nearest indexed edge.
    pub fn distance(&self, p: Point) -> Option<f64> {
        self.nearest(p).map(|(_, d)| d)
    }
}

/// Mutable point index over vertex ids.
#[derive(Debug, Clone)]
pub struct PointIndex {
    cell: f64,
    bins: HashMap<Bin, Vec<(VertexId, Point)>>,
}

impl PointIndex {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0);
        PointIndex {
            cell,
            bins: HashMap::new(),
        }
    }

    pub fn from_graph(g: &RoadGraph, cell: f64) -> Self {
        let mut idx = PointIndex::new(cell);
        for (v, p) in g.vertices() {
            idx.insert(v, p);
        }
        idx
    }

    pub fn insert(&mut self, v: VertexId, p: Point) {
        self.bins.entry(bin_of(p, self.cell)).or_default().push((v, p));
    }

    pub fn remove(&mut self, v: VertexId, p: Point) {
        if let Some(list) = self.bins.get_mut(&bin_of(p, self.cell)) {
            list.retain(|&(id, _)| id != v);
        }
    }

    /// All entries within `radius` of `p`, as `(id, distance)`.
    pub fn within(&self, p: Point, radius: f64) -> Vec<(VertexId, f64)> {
        let lo = bin_of(Point::new(p.x - radius, p.y - radius), self.cell);
        let hi = bin_of(Point::new(p.x + radius, p.y + radius), self.cell);
        let mut out = Vec::new();
        for i in lo.0..=hi.0 {
            for j in lo.1..=hi.1 {
                if let Some(list) = self.bins.get(&(i, j)) {
                    for &(v, q) in list {
                        let d = p.dist(q);
                        if d <= radius {
                            out.push((v, d));
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Frame;
    use crate::graph::project_to_graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nearest_matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut g = RoadGraph::new(Frame::default());
        for _ in 0..60 {
            let a = g.add_vertex(Point::new(rng.random_range(0.0..500.0), rng.random_range(0.0..500.0)));
            let b = g.add_vertex(Point::new(rng.random_range(0.0..500.0), rng.random_range(0.0..500.0)));
            g.add_edge(a, b).unwrap();
        }
        let idx = SegmentIndex::new(&g, 25.0);
        for _ in 0..300 {
            let p = Point::new(rng.random_range(-100.0..600.0), rng.random_range(-100.0..600.0));
            let (want, wd) = project_to_graph(p, &g).unwrap();
            let (got, gd) = idx.nearest(p).unwrap();
            assert_eq!(got.edge, want.edge);
            assert!((gd - wd).abs() < 1e-12);
            match idx.nearest_within(p, 30.0) {
                Some((pos, d)) => {
                    assert_eq!(pos.edge, want.edge);
                    assert!(d <= 30.0);
                }
                None => assert!(wd > 30.0),
            }
        }
    }

    #[test]
    fn point_index_insert_remove() {
        let mut idx = PointIndex::new(10.0);
        idx.insert(VertexId(1), Point::new(0.0, 0.0));
        idx.insert(VertexId(2), Point::new(15.0, 0.0));
        assert_eq!(idx.within(Point::new(1.0, 0.0), 20.0).len(), 2);
        idx.remove(VertexId(2), Point::new(15.0, 0.0));
        assert_eq!(idx.within(Point::new(1.0, 0.0), 20.0).len(), 1);
    }
}
