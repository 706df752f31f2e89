//! Major-road pruning.
//!
//! Vertices are clustered on a coarse grid; shortest paths are computed
//! between every pair of cluster centers that are far apart, and only the
//! middles of those paths (with `trim` meters cut from each end) survive.
//! Edge betweenness is provided as a baseline for comparison.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geo::Point;
use crate::graph::{connected_components, EdgeId, RoadGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PruneParams {
    /// Clustering grid cell size `r`, meters.
    pub cell_size: f64,
    pub min_cell_vertices: usize,
    /// Minimum straight-line separation `R` between paired centers, meters.
    pub min_separation: f64,
    /// Distance cut from each end of every center-to-center path, meters.
    pub trim: f64,
}

impl Default for PruneParams {
    fn default() -> Self {
        PruneParams {
            cell_size: 1000.0,
            min_cell_vertices: 10,
            min_separation: 5000.0,
            trim: 500.0,
        }
    }
}

impl PruneParams {
    pub fn validate(&self) -> Result<(), PruneError> {
        if !(self.cell_size > 0.0) || !(self.min_separation > 0.0) || !(self.trim >= 0.0) {
            return Err(PruneError::InvalidParams);
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PruneError {
    #[error("pruning parameters require r > 0, R > 0 and trim >= 0")]
    InvalidParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterCenter {
    /// Mean position of the cell's vertices.
    pub mean: Point,
    /// Graph vertex nearest to `mean`, used for routing.
    pub vertex: VertexId,
    pub members: usize,
}

/// Grid clustering aligned to the frame origin. Cells with fewer than
/// `min_cell_vertices` vertices are dropped. Centers come out in cell order.
pub fn grid_cluster(g: &RoadGraph, params: &PruneParams) -> Vec<ClusterCenter> {
    let mut cells: BTreeMap<(i64, i64), (Point, usize)> = BTreeMap::new();
    for (_, p) in g.vertices() {
        let key = (
            (p.x / params.cell_size).floor() as i64,
            (p.y / params.cell_size).floor() as i64,
        );
        let entry = cells.entry(key).or_insert((Point::default(), 0));
        entry.0 = entry.0 + p;
        entry.1 += 1;
    }
    cells
        .into_values()
        .filter(|&(_, n)| n >= params.min_cell_vertices)
        .map(|(sum, n)| {
            let mean = sum * (1.0 / n as f64);
            let vertex = g
                .vertices()
                .min_by(|a, b| a.1.dist2(mean).total_cmp(&b.1.dist2(mean)).then(a.0.cmp(&b.0)))
                .map(|(v, _)| v)
                .expect("non-empty cell implies vertices");
            ClusterCenter {
                mean,
                vertex,
                members: n,
            }
        })
        .collect()
}

/// Compact adjacency with vertices renumbered in id order, so comparing
/// indices compares ids.
pub(crate) struct DenseGraph {
    pub ids: Vec<VertexId>,
    pub index: HashMap<VertexId, usize>,
    pub adj: Vec<Vec<(usize, f64, EdgeId)>>,
}

impl DenseGraph {
    pub fn new(g: &RoadGraph) -> Self {
        let ids: Vec<VertexId> = g.vertex_ids().collect();
        let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for (e, edge) in g.edges() {
            let (a, b) = (index[&edge.a], index[&edge.b]);
            let len = g.edge_length(e);
            adj[a].push((b, len, e));
            adj[b].push((a, len, e));
        }
        DenseGraph { ids, index, adj }
    }
}

#[derive(PartialEq)]
struct Dist(f64);
impl Eq for Dist {}
impl PartialOrd for Dist {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Dist {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Single-source shortest-path tree. Among equally short routes the
/// predecessor with the lowest vertex id wins.
pub(crate) struct PathTree {
    pub dist: Vec<f64>,
    pub pred: Vec<Option<(usize, EdgeId)>>,
    /// Vertices in the order they were settled.
    pub order: Vec<usize>,
}

pub(crate) fn shortest_path_tree(g: &DenseGraph, source: usize, targets: &[usize]) -> PathTree {
    let n = g.ids.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<(usize, EdgeId)>> = vec![None; n];
    let mut done = vec![false; n];
    let mut order = Vec::new();
    let mut remaining: usize = {
        let mut t: Vec<usize> = targets.to_vec();
        t.sort_unstable();
        t.dedup();
        t.len()
    };
    let mut is_target = vec![false; n];
    for &t in targets {
        is_target[t] = true;
    }
    let stop_early = !targets.is_empty();

    dist[source] = 0.0;
    let mut heap = BinaryHeap::from([Reverse((Dist(0.0), source))]);
    while let Some(Reverse((Dist(d), u))) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        order.push(u);
        if stop_early && is_target[u] {
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
        for &(w, len, e) in &g.adj[u] {
            if done[w] {
                continue;
            }
            let nd = d + len;
            let eps = 1e-9 * nd.max(1.0);
            if nd < dist[w] - eps {
                dist[w] = nd;
                pred[w] = Some((u, e));
                heap.push(Reverse((Dist(nd), w)));
            } else if (nd - dist[w]).abs() <= eps && pred[w].is_some_and(|(p, _)| u < p) {
                pred[w] = Some((u, e));
            }
        }
    }
    PathTree { dist, pred, order }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PruneWarning {
    /// Fewer than two cluster centers.
    TooFewCenters,
    /// No pair of centers is at least `R` apart and connected.
    NoQualifyingPairs,
}

#[derive(Debug, Clone)]
pub struct PruneOutcome {
    /// Subgraph made of the retained edges.
    pub graph: RoadGraph,
    pub major: BTreeSet<EdgeId>,
    /// Number of center pairs whose path contributed.
    pub paths: usize,
    pub warning: Option<PruneWarning>,
}

/// Keeps the trimmed middles of shortest paths between far-apart centers.
pub fn prune_major(
    g: &RoadGraph,
    centers: &[ClusterCenter],
    params: &PruneParams,
) -> Result<PruneOutcome, PruneError> {
    params.validate()?;
    let empty = |warning| PruneOutcome {
        graph: g.empty_like(),
        major: BTreeSet::new(),
        paths: 0,
        warning: Some(warning),
    };
    if centers.len() < 2 {
        log::warn!("pruning needs at least two cluster centers, got {}", centers.len());
        return Ok(empty(PruneWarning::TooFewCenters));
    }
    // route inside each connected component; centers in different
    // components never pair up
    let components = connected_components(g);
    let comp_of: HashMap<VertexId, usize> = components
        .iter()
        .enumerate()
        .flat_map(|(k, c)| c.vertex_ids().map(move |v| (v, k)))
        .collect();
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, c) in centers.iter().enumerate() {
        members.entry(comp_of[&c.vertex]).or_default().push(i);
    }
    let dense: BTreeMap<usize, DenseGraph> = members
        .iter()
        .filter(|(_, m)| m.len() >= 2)
        .map(|(&k, _)| (k, DenseGraph::new(&components[k])))
        .collect();
    let sources: Vec<(usize, usize)> = members
        .iter()
        .filter(|(k, _)| dense.contains_key(k))
        .flat_map(|(&k, m)| m.iter().map(move |&i| (k, i)))
        .collect();
    let per_source: Vec<(BTreeSet<EdgeId>, usize)> = sources
        .into_par_iter()
        .map(|(k, i)| {
            let dense = &dense[&k];
            let targets: Vec<usize> = members[&k]
                .iter()
                .filter(|&&j| j > i && centers[i].mean.dist(centers[j].mean) >= params.min_separation)
                .map(|&j| dense.index[&centers[j].vertex])
                .collect();
            let mut kept = BTreeSet::new();
            if targets.is_empty() {
                return (kept, 0);
            }
            let source = dense.index[&centers[i].vertex];
            let tree = shortest_path_tree(dense, source, &targets);
            let mut paths = 0;
            for &t in &targets {
                let total = tree.dist[t];
                if !total.is_finite() || t == source {
                    continue;
                }
                paths += 1;
                let eps = 1e-9 * total.max(1.0);
                let mut x = t;
                while let Some((p, e)) = tree.pred[x] {
                    if tree.dist[p] >= params.trim - eps && tree.dist[x] <= total - params.trim + eps {
                        kept.insert(e);
                    }
                    x = p;
                }
            }
            (kept, paths)
        })
        .collect();

    let mut major = BTreeSet::new();
    let mut paths = 0;
    for (kept, n) in per_source {
        major.extend(kept);
        paths += n;
    }
    if paths == 0 {
        log::warn!("no pair of cluster centers is at least {} m apart and connected", params.min_separation);
        return Ok(empty(PruneWarning::NoQualifyingPairs));
    }
    Ok(PruneOutcome {
        graph: g.edge_subgraph(major.iter().copied()),
        major,
        paths,
        warning: None,
    })
}

/// Edge betweenness over ordered vertex pairs, counting one shortest path
/// per pair (lowest-id predecessor tie-break). Unreachable pairs add
/// nothing.
pub fn betweenness(g: &RoadGraph) -> BTreeMap<EdgeId, u64> {
    let dense = DenseGraph::new(g);
    let n = dense.ids.len();
    let partials: Vec<HashMap<EdgeId, u64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let tree = shortest_path_tree(&dense, s, &[]);
            let mut below = vec![1u64; n];
            let mut counts = HashMap::new();
            for &v in tree.order.iter().rev() {
                if let Some((p, e)) = tree.pred[v] {
                    *counts.entry(e).or_insert(0) += below[v];
                    below[p] += below[v];
                }
            }
            counts
        })
        .collect();
    let mut out: BTreeMap<EdgeId, u64> = g.edge_ids().map(|e| (e, 0)).collect();
    for part in partials {
        for (e, c) in part {
            *out.get_mut(&e).unwrap() += c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Frame;
    use crate::synth;

    #[test]
    fn betweenness_on_path() {
        let g = synth::path(4);
        let b: Vec<u64> = betweenness(&g).into_values().collect();
        assert_eq!(b, vec![6, 8, 6]);
        let g = synth::path(2);
        assert_eq!(betweenness(&g).into_values().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn betweenness_ignores_disconnected_pairs() {
        let mut g = synth::path(2);
        let a = g.add_vertex(Point::new(10.0, 10.0));
        let b = g.add_vertex(Point::new(11.0, 10.0));
        g.add_edge(a, b).unwrap();
        assert!(betweenness(&g).values().all(|&c| c == 2));
    }

    #[test]
    fn betweenness_tie_break_is_deterministic() {
        // unit square: two equal routes between opposite corners
        let g = synth::square_loop(1.0);
        let b = betweenness(&g);
        assert_eq!(b.values().sum::<u64>(), 4 * 3 + 4);
        assert_eq!(b, betweenness(&g));
    }

    #[test]
    fn sparse_cell_yields_no_center() {
        let g = synth::path(5);
        assert!(grid_cluster(&g, &PruneParams::default()).is_empty());
    }

    #[test]
    fn dense_cell_yields_centroid_vertex() {
        let mut g = RoadGraph::new(Frame::default());
        let mut prev = None;
        for i in 0..20 {
            let v = g.add_vertex(Point::new(100.0 + 10.0 * i as f64, 500.0));
            if let Some(p) = prev {
                g.add_edge(p, v).unwrap();
            }
            prev = Some(v);
        }
        let c = grid_cluster(&g, &PruneParams::default());
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].members, 20);
        assert!((c[0].mean.x - 195.0).abs() < 1e-9);
        // 190 and 200 are equally near 195; lower id wins
        assert_eq!(g.pos(c[0].vertex).x, 190.0);
    }

    #[test]
    fn too_few_centers_warns() {
        let g = synth::path(3);
        let out = prune_major(&g, &[], &PruneParams::default()).unwrap();
        assert_eq!(out.warning, Some(PruneWarning::TooFewCenters));
        assert_eq!(out.graph.num_edges(), 0);
    }

    #[test]
    fn close_centers_give_nothing() {
        let a = synth::grid(10, 50.0, Point::new(0.0, 0.0));
        let centers = [
            ClusterCenter { mean: Point::new(0.0, 0.0), vertex: VertexId(0), members: 10 },
            ClusterCenter { mean: Point::new(3000.0, 0.0), vertex: VertexId(5), members: 10 },
        ];
        let out = prune_major(&a, &centers, &PruneParams::default()).unwrap();
        assert_eq!(out.warning, Some(PruneWarning::NoQualifyingPairs));
        assert!(out.major.is_empty());
    }

    #[test]
    fn rejects_bad_params() {
        let p = PruneParams { trim: -1.0, ..Default::default() };
        assert_eq!(prune_major(&synth::path(3), &[], &p).unwrap_err(), PruneError::InvalidParams);
    }
}
