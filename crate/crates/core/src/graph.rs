//! Undirected planar road graphs with stable integer ids.
//!
//! Vertex ids are explicit so that an inferred graph and the base map it
//! was grown from can share junction vertices by id.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geo::{self, BBox, Frame, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Endpoints of an edge, normalized so that `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId) -> Edge {
        if u <= v {
            Edge { a: u, b: v }
        } else {
            Edge { a: v, b: u }
        }
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("edge {0} already exists")]
    DuplicateEdgeId(EdgeId),
    #[error("self-loop at {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("zero-length edge {0}-{1}")]
    ZeroLength(VertexId, VertexId),
    #[error("non-finite coordinate for vertex {0}")]
    NonFinite(VertexId),
    #[error("graph has no edges")]
    Empty,
}

/// A position on an edge: `t` is the fraction from `edge.a` to `edge.b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPosition {
    pub edge: EdgeId,
    pub t: f64,
    pub point: Point,
}

#[derive(Debug, Clone, Default)]
pub struct RoadGraph {
    frame: Frame,
    vertices: BTreeMap<VertexId, Point>,
    edges: BTreeMap<EdgeId, Edge>,
    adjacency: HashMap<VertexId, Vec<(VertexId, EdgeId)>>,
    pairs: HashMap<Edge, EdgeId>,
    next_vertex: u64,
    next_edge: u64,
}

/// Graphs compare equal when frame, vertex positions and the set of
/// endpoint pairs match. Edge ids are labels and do not take part.
impl PartialEq for RoadGraph {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame
            && self.vertices == other.vertices
            && self.edge_pairs() == other.edge_pairs()
    }
}

impl RoadGraph {
    pub fn new(frame: Frame) -> Self {
        RoadGraph {
            frame,
            ..Default::default()
        }
    }

    /// An empty graph sharing this graph's frame and id counters, so ids
    /// allocated in the result never collide with ids in `self`.
    pub fn empty_like(&self) -> Self {
        RoadGraph {
            frame: self.frame,
            next_vertex: self.next_vertex,
            next_edge: self.next_edge,
            ..Default::default()
        }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn set_frame(&mut self, frame: Frame) {
        self.frame = frame;
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, v: VertexId) -> Option<Point> {
        self.vertices.get(&v).copied()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    /// Position of a vertex known to exist.
    pub fn pos(&self, v: VertexId) -> Point {
        self.vertices[&v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, Point)> + '_ {
        self.vertices.iter().map(|(&id, &p)| (id, p))
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Edge)> + '_ {
        self.edges.iter().map(|(&id, &e)| (id, e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge(&self, e: EdgeId) -> Option<Edge> {
        self.edges.get(&e).copied()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.pairs.get(&Edge::new(u, v)).copied()
    }

    pub fn edge_pairs(&self) -> BTreeSet<Edge> {
        self.edges.values().copied().collect()
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        self.adjacency.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn edge_points(&self, e: EdgeId) -> (Point, Point) {
        let edge = self.edges[&e];
        (self.pos(edge.a), self.pos(edge.b))
    }

    pub fn edge_length(&self, e: EdgeId) -> f64 {
        let (a, b) = self.edge_points(e);
        a.dist(b)
    }

    pub fn total_length(&self) -> f64 {
        self.edge_ids().map(|e| self.edge_length(e)).sum()
    }

    pub fn bbox(&self) -> Option<BBox> {
        BBox::from_points(self.vertices.values().copied())
    }

    pub fn position_at(&self, e: EdgeId, t: f64) -> GraphPosition {
        let (a, b) = self.edge_points(e);
        GraphPosition {
            edge: e,
            t,
            point: a.lerp(b, t),
        }
    }

    pub fn add_vertex(&mut self, p: Point) -> VertexId {
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.vertices.insert(id, p);
        id
    }

    /// Inserts a vertex with a caller-chosen id.
    pub fn insert_vertex(&mut self, id: VertexId, p: Point) -> Result<(), GraphError> {
        if !p.is_finite() {
            return Err(GraphError::NonFinite(id));
        }
        if self.vertices.contains_key(&id) {
            return Err(GraphError::DuplicateVertex(id));
        }
        self.vertices.insert(id, p);
        self.next_vertex = self.next_vertex.max(id.0 + 1);
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        let id = EdgeId(self.next_edge);
        self.insert_edge(id, u, v)?;
        Ok(id)
    }

    pub fn insert_edge(&mut self, id: EdgeId, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        let pu = self.vertex(u).ok_or(GraphError::UnknownVertex(u))?;
        let pv = self.vertex(v).ok_or(GraphError::UnknownVertex(v))?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdgeId(id));
        }
        let edge = Edge::new(u, v);
        if self.pairs.contains_key(&edge) {
            return Err(GraphError::DuplicateEdge(edge.a, edge.b));
        }
        if pu.dist(pv) <= 0.0 {
            return Err(GraphError::ZeroLength(edge.a, edge.b));
        }
        self.edges.insert(id, edge);
        self.pairs.insert(edge, id);
        self.adjacency.entry(u).or_default().push((v, id));
        self.adjacency.entry(v).or_default().push((u, id));
        self.next_edge = self.next_edge.max(id.0 + 1);
        Ok(())
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        let edge = self.edges.remove(&id)?;
        self.pairs.remove(&edge);
        for v in [edge.a, edge.b] {
            if let Some(adj) = self.adjacency.get_mut(&v) {
                adj.retain(|&(_, e)| e != id);
                if adj.is_empty() {
                    self.adjacency.remove(&v);
                }
            }
        }
        Some(edge)
    }

    /// Removes a vertex together with its incident edges.
    pub fn remove_vertex(&mut self, v: VertexId) -> Option<Point> {
        let incident: Vec<EdgeId> = self.neighbors(v).iter().map(|&(_, e)| e).collect();
        for e in incident {
            self.remove_edge(e);
        }
        self.vertices.remove(&v)
    }

    pub fn remove_isolated_vertices(&mut self) {
        let isolated: Vec<VertexId> = self
            .vertex_ids()
            .filter(|&v| self.degree(v) == 0)
            .collect();
        for v in isolated {
            self.vertices.remove(&v);
        }
    }

    /// Checks the structural invariants. Intended for tests and for
    /// validating graphs read from files.
    pub fn validate(&self) -> Result<(), GraphError> {
        for (id, p) in self.vertices() {
            if !p.is_finite() {
                return Err(GraphError::NonFinite(id));
            }
        }
        let mut seen = HashSet::new();
        for (_, e) in self.edges() {
            let pa = self.vertex(e.a).ok_or(GraphError::UnknownVertex(e.a))?;
            let pb = self.vertex(e.b).ok_or(GraphError::UnknownVertex(e.b))?;
            if e.a == e.b {
                return Err(GraphError::SelfLoop(e.a));
            }
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(e.a, e.b));
            }
            if pa.dist(pb) <= 0.0 {
                return Err(GraphError::ZeroLength(e.a, e.b));
            }
        }
        Ok(())
    }

    /// Vertices reachable from `v` in at most `hops` edges, including `v`.
    pub fn within_hops(&self, v: VertexId, hops: usize) -> HashSet<VertexId> {
        let mut seen = HashSet::from([v]);
        let mut queue = VecDeque::from([(v, 0usize)]);
        while let Some((u, d)) = queue.pop_front() {
            if d == hops {
                continue;
            }
            for &(w, _) in self.neighbors(u) {
                if seen.insert(w) {
                    queue.push_back((w, d + 1));
                }
            }
        }
        seen
    }

    /// Subgraph containing the given edges and their endpoints. Ids and
    /// frame are preserved.
    pub fn edge_subgraph<I: IntoIterator<Item = EdgeId>>(&self, edges: I) -> RoadGraph {
        let mut out = self.empty_like();
        for e in edges {
            let Some(edge) = self.edge(e) else { continue };
            for v in [edge.a, edge.b] {
                if !out.contains_vertex(v) {
                    out.vertices.insert(v, self.pos(v));
                }
            }
            out.insert_edge(e, edge.a, edge.b)
                .expect("edge copied from a valid graph");
        }
        out
    }
}

/// Nearest position on any edge of `g` to `p`. Ties go to the lowest edge id.
pub fn project_to_graph(p: Point, g: &RoadGraph) -> Result<(GraphPosition, f64), GraphError> {
    let mut best: Option<(EdgeId, f64, f64)> = None;
    for (id, _) in g.edges() {
        let (a, b) = g.edge_points(id);
        let (t, d) = geo::project_to_segment(p, a, b);
        if best.is_none_or(|(_, _, bd)| d < bd) {
            best = Some((id, t, d));
        }
    }
    let (e, t, d) = best.ok_or(GraphError::Empty)?;
    Ok((g.position_at(e, t), d))
}

/// Bounded Dijkstra over vertex ids from seeded start distances.
pub(crate) fn bounded_distances(
    g: &RoadGraph,
    seeds: &[(VertexId, f64)],
    limit: f64,
) -> HashMap<VertexId, f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Key(f64);
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Key {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&o.0)
        }
    }

    let mut dist: HashMap<VertexId, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for &(v, d) in seeds {
        if d <= limit && dist.get(&v).is_none_or(|&old| d < old) {
            dist.insert(v, d);
            heap.push(Reverse((Key(d), v)));
        }
    }
    while let Some(Reverse((Key(d), u))) = heap.pop() {
        if d > dist[&u] {
            continue;
        }
        let pu = g.pos(u);
        for &(w, _) in g.neighbors(u) {
            let nd = d + pu.dist(g.pos(w));
            if nd <= limit && dist.get(&w).is_none_or(|&old| nd < old) {
                dist.insert(w, nd);
                heap.push(Reverse((Key(nd), w)));
            }
        }
    }
    dist
}

/// For every requested distance `d`, all points on `g` whose shortest
/// along-graph distance from `start` is exactly `d`. Returns `(d, point)`
/// pairs; coincident points at the same distance are reported once.
pub fn points_at_distances(g: &RoadGraph, start: &GraphPosition, dists: &[f64]) -> Vec<(f64, Point)> {
    let Some(&max_d) = dists.iter().max_by(|a, b| a.total_cmp(b)) else {
        return Vec::new();
    };
    let start_edge = g.edge(start.edge).expect("start position on a graph edge");
    let start_len = g.edge_length(start.edge);
    let s0 = start.t * start_len;
    let dist = bounded_distances(
        g,
        &[(start_edge.a, s0), (start_edge.b, start_len - s0)],
        max_d,
    );
    let d_of = |v: VertexId| dist.get(&v).copied().unwrap_or(f64::INFINITY);

    let mut out: Vec<(f64, Point)> = Vec::new();
    let mut seen: HashSet<(u64, i64, i64)> = HashSet::new();
    let mut push = |d: f64, p: Point| {
        let key = (d.to_bits(), (p.x * 1e6).round() as i64, (p.y * 1e6).round() as i64);
        if seen.insert(key) {
            out.push((d, p));
        }
    };

    // Candidate edges: the start edge plus every edge with a reached endpoint.
    let mut candidates: BTreeSet<EdgeId> = BTreeSet::from([start.edge]);
    for &v in dist.keys() {
        for &(_, e) in g.neighbors(v) {
            candidates.insert(e);
        }
    }

    for e in candidates {
        let edge = g.edge(e).unwrap();
        let (pa, pb) = (g.pos(edge.a), g.pos(edge.b));
        let len = pa.dist(pb);
        let (da, db) = (d_of(edge.a), d_of(edge.b));
        let on_start = e == start.edge;
        // shortest distance from start to the point at arc length s from a
        let f = |s: f64| {
            let mut v = (da + s).min(db + len - s);
            if on_start {
                v = v.min((s - s0).abs());
            }
            v
        };
        for &d in dists {
            let mut cands = vec![d - da, len - (d - db)];
            if on_start {
                cands.push(s0 + d);
                cands.push(s0 - d);
            }
            let tol = 1e-9 * d.max(1.0);
            for s in cands {
                if !s.is_finite() || s < -tol || s > len + tol {
                    continue;
                }
                let s = s.clamp(0.0, len);
                if (f(s) - d).abs() <= tol {
                    push(d, pa.lerp(pb, s / len));
                }
            }
        }
    }
    out
}

/// Every point whose shortest along-graph distance from `start` is `d`.
pub fn points_at_graph_distance(g: &RoadGraph, start: &GraphPosition, d: f64) -> Vec<Point> {
    points_at_distances(g, start, &[d])
        .into_iter()
        .map(|(_, p)| p)
        .collect()
}

/// Splits every edge longer than `d` by inserting `floor(len / d)` evenly
/// spaced vertices. Existing vertex and edge ids are kept; split edges are
/// replaced by chains with fresh ids.
pub fn densify(g: &RoadGraph, d: f64) -> RoadGraph {
    assert!(d > 0.0, "densify spacing must be positive");
    let mut out = g.empty_like();
    for (id, p) in g.vertices() {
        out.vertices.insert(id, p);
    }
    let mut long = Vec::new();
    for (id, e) in g.edges() {
        if g.edge_length(id) > d {
            long.push(e);
        } else {
            out.insert_edge(id, e.a, e.b).expect("copy of valid edge");
        }
    }
    for e in long {
        let (pa, pb) = (g.pos(e.a), g.pos(e.b));
        let n = (pa.dist(pb) / d).floor() as usize;
        let mut prev = e.a;
        for k in 1..=n {
            let v = out.add_vertex(pa.lerp(pb, k as f64 / (n + 1) as f64));
            out.add_edge(prev, v).expect("fresh chain edge");
            prev = v;
        }
        out.add_edge(prev, e.b).expect("fresh chain edge");
    }
    out
}

/// Connected components ordered by their smallest vertex id. Ids and frame
/// are preserved in each component.
pub fn connected_components(g: &RoadGraph) -> Vec<RoadGraph> {
    let mut seen: HashSet<VertexId> = HashSet::new();
    let mut out = Vec::new();
    for root in g.vertex_ids() {
        if !seen.insert(root) {
            continue;
        }
        let mut comp = g.empty_like();
        let mut edges = BTreeSet::new();
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            comp.vertices.insert(u, g.pos(u));
            for &(w, e) in g.neighbors(u) {
                edges.insert(e);
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        for e in edges {
            let edge = g.edge(e).unwrap();
            comp.insert_edge(e, edge.a, edge.b).unwrap();
        }
        out.push(comp);
    }
    out
}

/// Area of the convex hull of all vertices. Degenerate hulls have area 0.
pub fn convex_hull_area(g: &RoadGraph) -> f64 {
    let pts: Vec<Point> = g.vertices().map(|(_, p)| p).collect();
    geo::convex_hull_area_of(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[(f64, f64)]) -> RoadGraph {
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

    fn sorted(mut pts: Vec<Point>) -> Vec<Point> {
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = RoadGraph::new(Frame::default());
        let a = g.add_vertex(Point::new(0.0, 0.0));
        let b = g.add_vertex(Point::new(1.0, 0.0));
        let c = g.add_vertex(Point::new(0.0, 0.0));
        assert_eq!(g.add_edge(a, a), Err(GraphError::SelfLoop(a)));
        assert_eq!(g.add_edge(a, c), Err(GraphError::ZeroLength(a, c)));
        g.add_edge(a, b).unwrap();
        assert_eq!(g.add_edge(b, a), Err(GraphError::DuplicateEdge(a, b)));
        assert_eq!(
            g.add_edge(a, VertexId(99)),
            Err(GraphError::UnknownVertex(VertexId(99)))
        );
    }

    #[test]
    fn projection_examples() {
        let g = line(&[(0.0, 0.0), (10.0, 0.0)]);
        let (pos, d) = project_to_graph(Point::new(0.0, 5.0), &g).unwrap();
        assert_eq!(pos.t, 0.0);
        assert_eq!(pos.point, Point::new(0.0, 0.0));
        assert!((d - 5.0).abs() < 1e-12);

        let (pos, d) = project_to_graph(Point::new(3.0, 0.0), &g).unwrap();
        assert_eq!(d, 0.0);
        assert!((pos.t - 0.3).abs() < 1e-12);

        let mut g2 = line(&[(0.0, 0.0), (10.0, 0.0)]);
        let c = g2.add_vertex(Point::new(0.0, 4.0));
        let d2 = g2.add_vertex(Point::new(10.0, 4.0));
        let upper = g2.add_edge(c, d2).unwrap();
        let (pos, d) = project_to_graph(Point::new(5.0, 3.0), &g2).unwrap();
        assert_eq!(pos.edge, upper);
        assert!((d - 1.0).abs() < 1e-12);

        assert!(project_to_graph(Point::new(0.0, 0.0), &RoadGraph::default()).is_err());
    }

    #[test]
    fn projection_tie_goes_to_lowest_edge() {
        let mut g = line(&[(0.0, 1.0), (10.0, 1.0)]);
        let a = g.add_vertex(Point::new(0.0, -1.0));
        let b = g.add_vertex(Point::new(10.0, -1.0));
        g.add_edge(a, b).unwrap();
        let (pos, _) = project_to_graph(Point::new(5.0, 0.0), &g).unwrap();
        assert_eq!(pos.edge, EdgeId(0));
    }

    #[test]
    fn distance_points_on_straight_road() {
        let g = line(&[(0.0, 0.0), (100.0, 0.0)]);
        let mid = g.position_at(EdgeId(0), 0.5);
        assert_eq!(
            sorted(points_at_graph_distance(&g, &mid, 12.0)),
            vec![Point::new(38.0, 0.0), Point::new(62.0, 0.0)]
        );
        let near_end = g.position_at(EdgeId(0), 0.05);
        assert_eq!(
            points_at_graph_distance(&g, &near_end, 12.0),
            vec![Point::new(17.0, 0.0)]
        );
    }

    #[test]
    fn distance_points_at_plus_junction() {
        let mut g = RoadGraph::new(Frame::default());
        let c = g.add_vertex(Point::new(0.0, 0.0));
        for (x, y) in [(50.0, 0.0), (0.0, 50.0), (-50.0, 0.0), (0.0, -50.0)] {
            let v = g.add_vertex(Point::new(x, y));
            g.add_edge(c, v).unwrap();
        }
        let start = g.position_at(EdgeId(0), 0.0);
        let pts = sorted(points_at_graph_distance(&g, &start, 12.0));
        assert_eq!(pts.len(), 4);
        for p in pts {
            assert!((p.norm() - 12.0).abs() < 1e-9);
        }
    }

    #[test]
    fn distance_points_around_corner_and_across_vertices() {
        // L-shaped road: 5 m east then north.
        let g = line(&[(0.0, 0.0), (5.0, 0.0), (5.0, 100.0)]);
        let start = g.position_at(EdgeId(0), 0.0);
        let pts = points_at_graph_distance(&g, &start, 12.0);
        assert_eq!(pts.len(), 1);
        assert!(pts[0].dist(Point::new(5.0, 7.0)) < 1e-9);
        // exactly on a vertex
        let pts = points_at_graph_distance(&g, &start, 5.0);
        assert_eq!(pts, vec![Point::new(5.0, 0.0)]);
    }

    #[test]
    fn loop_meets_itself_once() {
        // square loop of perimeter 40 starting at a corner: distance 20 is
        // the opposite corner, reached by two routes but reported once
        let g = line(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)]);
        let mut g = g;
        g.add_edge(VertexId(3), VertexId(0)).unwrap();
        let start = g.position_at(EdgeId(0), 0.0);
        let pts = points_at_graph_distance(&g, &start, 20.0);
        assert_eq!(pts, vec![Point::new(10.0, 10.0)]);
    }

    #[test]
    fn densify_examples() {
        let g = line(&[(0.0, 0.0), (25.0, 0.0)]);
        let d = densify(&g, 12.0);
        assert_eq!(d.num_vertices(), 4);
        assert_eq!(d.num_edges(), 3);
        for e in d.edge_ids() {
            assert!((d.edge_length(e) - 25.0 / 3.0).abs() < 1e-9);
        }
        let g = line(&[(0.0, 0.0), (12.0, 0.0)]);
        assert_eq!(densify(&g, 12.0), g);
    }

    #[test]
    fn components_of_two_disjoint_edges() {
        let mut g = line(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(connected_components(&g).len(), 1);
        let a = g.add_vertex(Point::new(5.0, 5.0));
        let b = g.add_vertex(Point::new(6.0, 5.0));
        g.add_edge(a, b).unwrap();
        let comps = connected_components(&g);
        assert_eq!(comps.len(), 2);
        assert!(comps[0].contains_vertex(VertexId(0)));
        assert!(comps[1].contains_vertex(a));
    }

    #[test]
    fn hops_neighborhood() {
        let g = line(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
        assert_eq!(g.within_hops(VertexId(0), 2).len(), 3);
        assert_eq!(g.within_hops(VertexId(1), 5).len(), 4);
        assert_eq!(g.within_hops(VertexId(1), 0).len(), 1);
    }
}
