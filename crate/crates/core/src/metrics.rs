//! Map comparison metrics: TOPO precision/recall and road geometry error.
//!
//! TOPO simulates travel from many origins. Around each origin it drops
//! "marbles" at every `marble_spacing` meters of along-graph travel up to
//! `travel_radius` in both maps, then matches marbles one-to-one within
//! `match_radius`. Origins are sampled on both maps: an origin on the
//! inferred map that has no counterpart in the truth scores zero
//! precision, and vice versa for recall.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geo::Point;
use crate::graph::{points_at_distances, GraphPosition, RoadGraph};
use crate::spatial::{PointIndex, SegmentIndex};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("ground-truth graph has no edges")]
    EmptyTruth,
    #[error("added graph has no edges")]
    EmptyAdded,
    #[error("invalid metric parameters: {0}")]
    InvalidParams(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopoParams {
    pub origin_spacing: f64,
    pub match_radius: f64,
    pub travel_radius: f64,
    pub marble_spacing: f64,
    /// Maximum origins sampled per map; spacing widens to respect it.
    pub max_origins: usize,
    pub seed: u64,
}

impl Default for TopoParams {
    fn default() -> Self {
        TopoParams {
            origin_spacing: 50.0,
            match_radius: 15.0,
            travel_radius: 300.0,
            marble_spacing: 10.0,
            max_origins: 1000,
            seed: 0,
        }
    }
}

impl TopoParams {
    fn validate(&self) -> Result<(), MetricsError> {
        if !(self.marble_spacing > 0.0 && self.marble_spacing < self.travel_radius) {
            return Err(MetricsError::InvalidParams(
                "marble spacing must be positive and below the travel radius",
            ));
        }
        if !(self.match_radius > 0.0 && self.match_radius < self.origin_spacing) {
            return Err(MetricsError::InvalidParams(
                "match radius must be positive and below the origin spacing",
            ));
        }
        if self.max_origins == 0 {
            return Err(MetricsError::InvalidParams("max_origins must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OriginSource {
    Truth,
    Inferred,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OriginResult {
    pub source: OriginSource,
    pub x: f64,
    pub y: f64,
    pub matched: bool,
    pub truth_marbles: usize,
    pub inferred_marbles: usize,
    pub matched_marbles: usize,
}

impl OriginResult {
    fn precision(&self) -> Option<f64> {
        match (self.source, self.matched) {
            (_, true) => Some(self.matched_marbles as f64 / self.inferred_marbles as f64),
            (OriginSource::Inferred, false) => Some(0.0),
            (OriginSource::Truth, false) => None,
        }
    }

    fn recall(&self) -> Option<f64> {
        match (self.source, self.matched) {
            (_, true) => Some(self.matched_marbles as f64 / self.truth_marbles as f64),
            (OriginSource::Truth, false) => Some(0.0),
            (OriginSource::Inferred, false) => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopoResult {
    pub precision: f64,
    pub recall: f64,
    pub origins: Vec<OriginResult>,
}

impl TopoResult {
    pub fn f1(&self) -> f64 {
        if self.precision + self.recall == 0.0 {
            0.0
        } else {
            2.0 * self.precision * self.recall / (self.precision + self.recall)
        }
    }
}

/// Origins spread along `g` by cumulative edge length, one per stratum of
/// `spacing` meters with a seeded random offset inside the stratum.
pub fn sample_origins(g: &RoadGraph, spacing: f64, cap: usize, seed: u64) -> Vec<GraphPosition> {
    let edges: Vec<_> = g.edge_ids().map(|e| (e, g.edge_length(e))).collect();
    let total: f64 = edges.iter().map(|(_, l)| l).sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let spacing = spacing.max(total / cap as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut k = 0usize;
    let mut ei = 0usize;
    let mut start = 0.0;
    loop {
        let s = (k as f64 + rng.random::<f64>()) * spacing;
        if s >= total {
            break;
        }
        while ei + 1 < edges.len() && start + edges[ei].1 <= s {
            start += edges[ei].1;
            ei += 1;
        }
        let (e, len) = edges[ei];
        out.push(g.position_at(e, ((s - start) / len).clamp(0.0, 1.0)));
        k += 1;
    }
    out
}

fn marbles(g: &RoadGraph, start: &GraphPosition, params: &TopoParams) -> Vec<Point> {
    let n = (params.travel_radius / params.marble_spacing).floor() as usize;
    let dists: Vec<f64> = (0..=n).map(|k| k as f64 * params.marble_spacing).collect();
    points_at_distances(g, start, &dists)
        .into_iter()
        .map(|(_, p)| p)
        .collect()
}

/// Greedy one-to-one matching: closest pairs first, ties by index.
pub fn match_marbles(a: &[Point], b: &[Point], radius: f64) -> usize {
    let mut index = PointIndex::new(radius.max(1e-9));
    for (j, &p) in b.iter().enumerate() {
        index.insert(crate::graph::VertexId(j as u64), p);
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &p) in a.iter().enumerate() {
        for (j, d) in index.within(p, radius) {
            pairs.push((d, i, j.0 as usize));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut matched = 0;
    for (_, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            matched += 1;
        }
    }
    matched
}

pub fn topo_compare(
    inferred: &RoadGraph,
    truth: &RoadGraph,
    params: &TopoParams,
) -> Result<TopoResult, MetricsError> {
    params.validate()?;
    if truth.num_edges() == 0 {
        return Err(MetricsError::EmptyTruth);
    }
    let truth_index = SegmentIndex::new(truth, params.match_radius.max(10.0));
    let inferred_index = SegmentIndex::new(inferred, params.match_radius.max(10.0));

    let mut jobs: Vec<(OriginSource, GraphPosition)> = Vec::new();
    for pos in sample_origins(truth, params.origin_spacing, params.max_origins, params.seed) {
        jobs.push((OriginSource::Truth, pos));
    }
    for pos in sample_origins(inferred, params.origin_spacing, params.max_origins, params.seed) {
        jobs.push((OriginSource::Inferred, pos));
    }

    let origins: Vec<OriginResult> = jobs
        .par_iter()
        .map(|(source, pos)| {
            let (own, other_graph, other_index) = match source {
                OriginSource::Truth => (truth, inferred, &inferred_index),
                OriginSource::Inferred => (inferred, truth, &truth_index),
            };
            let mut r = OriginResult {
                source: *source,
                x: pos.point.x,
                y: pos.point.y,
                matched: false,
                truth_marbles: 0,
                inferred_marbles: 0,
                matched_marbles: 0,
            };
            let Some((other_pos, _)) = other_index.nearest_within(pos.point, params.match_radius)
            else {
                return r;
            };
            let own_m = marbles(own, pos, params);
            let other_m = marbles(other_graph, &other_pos, params);
            let (t, i) = match source {
                OriginSource::Truth => (own_m, other_m),
                OriginSource::Inferred => (other_m, own_m),
            };
            r.matched = true;
            r.truth_marbles = t.len();
            r.inferred_marbles = i.len();
            r.matched_marbles = match_marbles(&t, &i, params.match_radius);
            r
        })
        .collect();

    let mean = |xs: Vec<f64>| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let precision = mean(origins.iter().filter_map(OriginResult::precision).collect()).unwrap_or(1.0);
    let recall = mean(origins.iter().filter_map(OriginResult::recall).collect()).unwrap_or(0.0);
    Ok(TopoResult {
        precision,
        recall,
        origins,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RgeResult {
    pub rge: f64,
    pub max_rge: f64,
    pub samples: usize,
}

pub const DEFAULT_RGE_SPACING: f64 = 5.0;

/// Sample points along `g`: each edge is cut into `ceil(len / spacing)`
/// equal pieces and sampled at piece midpoints.
pub fn sample_along(g: &RoadGraph, spacing: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for e in g.edge_ids() {
        let (a, b) = g.edge_points(e);
        let n = (a.dist(b) / spacing).ceil().max(1.0) as usize;
        for k in 0..n {
            out.push(a.lerp(b, (k as f64 + 0.5) / n as f64));
        }
    }
    out
}

/// Mean and maximum distance from points sampled along `added` to the
/// nearest edge of `truth`.
pub fn rge(added: &RoadGraph, truth: &RoadGraph, spacing: f64) -> Result<RgeResult, MetricsError> {
    if !(spacing > 0.0) {
        return Err(MetricsError::InvalidParams("sample spacing must be positive"));
    }
    if added.num_edges() == 0 {
        return Err(MetricsError::EmptyAdded);
    }
    if truth.num_edges() == 0 {
        return Err(MetricsError::EmptyTruth);
    }
    let index = SegmentIndex::new(truth, (4.0 * spacing).max(10.0));
    let samples = sample_along(added, spacing);
    let dists: Vec<f64> = samples
        .iter()
        .map(|&p| index.distance(p).expect("truth has edges"))
        .collect();
    Ok(RgeResult {
        rge: dists.iter().sum::<f64>() / dists.len() as f64,
        max_rge: dists.iter().copied().fold(0.0, f64::max),
        samples: dists.len(),
    })
}
