//! Synthetic road networks used by the examples, tests and benchmarks.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geo::{Frame, Point};
use crate::graph::{EdgeId, RoadGraph, VertexId};

/// Builds graphs from lattice coordinates, reusing a vertex whenever the
/// same integer position comes up again.
struct LatticeBuilder {
    g: RoadGraph,
    ids: BTreeMap<(i64, i64), VertexId>,
    scale: f64,
    offset: Point,
}

impl LatticeBuilder {
    fn new(frame: Frame, scale: f64, offset: Point) -> Self {
        LatticeBuilder {
            g: RoadGraph::new(frame),
            ids: BTreeMap::new(),
            scale,
            offset,
        }
    }

    fn vertex(&mut self, i: i64, j: i64) -> VertexId {
        if let Some(&v) = self.ids.get(&(i, j)) {
            return v;
        }
        let p = self.offset + Point::new(i as f64, j as f64) * self.scale;
        let v = self.g.add_vertex(p);
        self.ids.insert((i, j), v);
        v
    }

    fn edge(&mut self, a: (i64, i64), b: (i64, i64)) {
        let (u, v) = (self.vertex(a.0, a.1), self.vertex(b.0, b.1));
        if self.g.edge_between(u, v).is_none() {
            self.g.add_edge(u, v).unwrap();
        }
    }
}

/// Square street grid of `n × n` blocks of `spacing` meters with its
/// lower-left corner at `offset`.
pub fn grid(n: usize, spacing: f64, offset: Point) -> RoadGraph {
    let mut b = LatticeBuilder::new(Frame::default(), spacing, offset);
    let n = n as i64;
    for i in 0..=n {
        for j in 0..=n {
            if i < n {
                b.edge((i, j), (i + 1, j));
            }
            if j < n {
                b.edge((i, j), (i, j + 1));
            }
        }
    }
    b.g
}

/// The 2 km × 2 km test city: a 100 m street grid plus three diagonal
/// avenues running through grid intersections.
pub fn grid_city() -> RoadGraph {
    grid_with_avenues(20, 100.0)
}

pub fn grid_with_avenues(n: usize, spacing: f64) -> RoadGraph {
    let mut b = LatticeBuilder::new(Frame::default(), spacing, Point::default());
    let n = n as i64;
    for i in 0..=n {
        for j in 0..=n {
            if i < n {
                b.edge((i, j), (i + 1, j));
            }
            if j < n {
                b.edge((i, j), (i, j + 1));
            }
        }
    }
    // y = x, y = n - x, and y = x + n/2 in lattice units
    for k in 0..n {
        b.edge((k, k), (k + 1, k + 1));
        b.edge((k, n - k), (k + 1, n - k - 1));
    }
    let half = n / 2;
    for k in 0..(n - half) {
        b.edge((k, k + half), (k + 1, k + half + 1));
    }
    b.g
}

/// Two dense square grids `separation` meters apart (lower-left corner to
/// lower-left corner) joined by one straight connector between the middles
/// of their facing sides. The connector is split into pieces of at most
/// `connector_step` meters.
pub fn barbell(side: f64, grid_spacing: f64, separation: f64, connector_step: f64) -> Barbell {
    barbell_at(side, grid_spacing, separation, connector_step, Point::default())
}

#[derive(Debug, Clone)]
pub struct Barbell {
    pub graph: RoadGraph,
    pub connector: Vec<EdgeId>,
    /// Connector endpoints, west then east.
    pub connector_ends: (Point, Point),
}

pub fn barbell_at(
    side: f64,
    grid_spacing: f64,
    separation: f64,
    connector_step: f64,
    offset: Point,
) -> Barbell {
    let n = (side / grid_spacing).round() as i64;
    let mut b = LatticeBuilder::new(Frame::default(), grid_spacing, offset);
    let shift = (separation / grid_spacing).round() as i64;
    for base in [0, shift] {
        for i in 0..=n {
            for j in 0..=n {
                if i < n {
                    b.edge((base + i, j), (base + i + 1, j));
                }
                if j < n {
                    b.edge((base + i, j), (base + i, j + 1));
                }
            }
        }
    }
    let west = b.vertex(n, n / 2);
    let east = b.vertex(shift, n / 2);
    let mut g = b.g;
    let (pw, pe) = (g.pos(west), g.pos(east));
    let pieces = (pw.dist(pe) / connector_step).ceil() as usize;
    let mut connector = Vec::new();
    let mut prev = west;
    for k in 1..=pieces {
        let v = if k == pieces {
            east
        } else {
            g.add_vertex(pw.lerp(pe, k as f64 / pieces as f64))
        };
        connector.push(g.add_edge(prev, v).unwrap());
        prev = v;
    }
    Barbell {
        graph: g,
        connector,
        connector_ends: (pw, pe),
    }
}

/// `copies` barbells stacked north-south, `row_spacing` meters apart, as one
/// graph. Copies are not connected to each other.
pub fn barbell_rows(copies: usize, row_spacing: f64) -> RoadGraph {
    let mut g = RoadGraph::new(Frame::default());
    for k in 0..copies {
        let part = barbell_at(500.0, 50.0, 6000.0, 250.0, Point::new(0.0, k as f64 * row_spacing)).graph;
        let mut ids = BTreeMap::new();
        for (v, p) in part.vertices() {
            ids.insert(v, g.add_vertex(p));
        }
        for (_, e) in part.edges() {
            g.add_edge(ids[&e.a], ids[&e.b]).unwrap();
        }
    }
    g
}

/// Simple path `0 – 1 – … – (n-1)` with unit spacing along x.
pub fn path(n: usize) -> RoadGraph {
    let mut g = RoadGraph::new(Frame::default());
    let ids: Vec<_> = (0..n)
        .map(|i| g.add_vertex(Point::new(i as f64, 0.0)))
        .collect();
    for w in ids.windows(2) {
        g.add_edge(w[0], w[1]).unwrap();
    }
    g
}

/// Closed square loop with corners at `(0,0)` and `(side, side)`.
pub fn square_loop(side: f64) -> RoadGraph {
    let mut g = RoadGraph::new(Frame::default());
    let ids: Vec<_> = [(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)]
        .iter()
        .map(|&(x, y)| g.add_vertex(Point::new(x, y)))
        .collect();
    for k in 0..4 {
        g.add_edge(ids[k], ids[(k + 1) % 4]).unwrap();
    }
    g
}

/// Splits `g` into a base map (the kept edges) and the removed edges, by
/// removing `fraction` of the edges chosen uniformly with a seeded RNG.
/// Vertices that lose all edges are dropped from the base.
pub fn remove_edges(g: &RoadGraph, fraction: f64, seed: u64) -> (RoadGraph, RoadGraph) {
    let mut ids: Vec<EdgeId> = g.edge_ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let k = (ids.len() as f64 * fraction).round() as usize;
    let removed: BTreeSet<EdgeId> = ids[..k].iter().copied().collect();
    let base = g.edge_subgraph(g.edge_ids().filter(|e| !removed.contains(e)));
    let gone = g.edge_subgraph(removed);
    (base, gone)
}
