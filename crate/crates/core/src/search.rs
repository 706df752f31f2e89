//! Iterative graph construction over a direction field.
//!
//! The search keeps a vertex stack. At the top vertex it reads the field,
//! masks out directions already covered by the graph nearby, and either
//! extends a fixed-length segment along the strongest remaining direction
//! or pops the vertex. Equal likelihoods prefer the direction closest to
//! straight ahead. Fresh tips that come within the merge radius of an
//! unrelated vertex lying ahead of them are joined to it, which closes
//! loops and connects junctions without tracing a road twice.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::f64::consts::TAU;

use crate::field::DirectionField;
use crate::geo::{normalize_angle, Point};
use crate::graph::{densify, EdgeId, RoadGraph, VertexId};
use crate::spatial::PointIndex;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchParams {
    /// Segment length added per extension, in meters.
    pub step: f64,
    /// Minimum masked likelihood needed to extend.
    pub threshold: f32,
    /// Buckets zeroed on each side of an explored direction.
    pub mask_halfwidth: usize,
    pub merge_radius: f64,
    /// Vertices within this many hops are never merge targets.
    pub hop_exclusion: usize,
    /// Step budget; `None` derives one from the field size.
    pub max_steps: Option<usize>,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams::new(crate::field::DEFAULT_LABEL_DISTANCE, 0.4)
    }
}

impl SearchParams {
    pub fn new(step: f64, threshold: f32) -> Self {
        SearchParams {
            step,
            threshold,
            mask_halfwidth: 5,
            merge_radius: 2.0 * step,
            hop_exclusion: 5,
            max_steps: None,
        }
    }

    pub fn validate(&self, buckets: usize) -> Result<(), SearchError> {
        let bad = |msg: &str| Err(SearchError::InvalidParams(msg.to_string()));
        if !(self.step > 0.0) {
            return bad("step must be positive");
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad("threshold must lie in (0, 1)");
        }
        if self.mask_halfwidth >= buckets / 2 {
            return bad("mask half-width must be below half the bucket count");
        }
        if !(self.merge_radius > 0.0) {
            return bad("merge radius must be positive");
        }
        Ok(())
    }

    fn step_budget(&self, field: &DirectionField) -> usize {
        self.max_steps.unwrap_or_else(|| {
            let g = field.grid();
            (4.0 * (g.width as f64 * g.height as f64 * g.cell_size / self.step)).ceil() as usize
        })
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SearchError {
    #[error("no seed points")]
    NoSeeds,
    #[error("base map is empty")]
    EmptyBaseMap,
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    Extended {
        from: VertexId,
        vertex: VertexId,
        edge: EdgeId,
    },
    Merged {
        vertex: VertexId,
        target: VertexId,
        edge: EdgeId,
    },
    Popped(VertexId),
    Terminated,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SearchStats {
    pub extended: usize,
    pub merged: usize,
    pub popped: usize,
    /// Seeds discarded because a traced road already passed within the
    /// merge radius. Included in `popped`.
    pub dropped_seeds: usize,
    pub steps: usize,
    pub hit_step_limit: bool,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub graph: RoadGraph,
    pub base_edges: BTreeSet<EdgeId>,
    pub stats: SearchStats,
}

impl SearchOutcome {
    /// Inferred part of the result (base edges removed).
    pub fn inferred(&self) -> RoadGraph {
        extract_inferred(&self.graph, &self.base_edges)
    }
}

pub struct SearchState<'f> {
    graph: RoadGraph,
    stack: Vec<VertexId>,
    field: &'f DirectionField,
    params: SearchParams,
    base_edges: BTreeSet<EdgeId>,
    base_vertices: HashSet<VertexId>,
    index: PointIndex,
    /// Bucket of the extension that created each traced vertex.
    heading: HashMap<VertexId, usize>,
    max_steps: usize,
    stats: SearchStats,
}

impl<'f> SearchState<'f> {
    /// Starts from isolated seed vertices. `seeds` is in priority order:
    /// the first seed ends up on top of the stack.
    pub fn from_seeds(
        field: &'f DirectionField,
        seeds: &[Point],
        frame: crate::geo::Frame,
        params: SearchParams,
    ) -> Result<Self, SearchError> {
        params.validate(field.grid().buckets)?;
        if seeds.is_empty() {
            return Err(SearchError::NoSeeds);
        }
        let mut graph = RoadGraph::new(frame);
        let ids: Vec<VertexId> = seeds.iter().map(|&p| graph.add_vertex(p)).collect();
        let stack = ids.into_iter().rev().collect();
        Ok(Self::with_graph(field, graph, stack, BTreeSet::new(), params))
    }

    /// Starts from an existing map: the map is densified to the step
    /// length and every vertex goes on the stack.
    pub fn from_basemap(
        field: &'f DirectionField,
        base: &RoadGraph,
        params: SearchParams,
    ) -> Result<Self, SearchError> {
        params.validate(field.grid().buckets)?;
        if base.is_empty() {
            return Err(SearchError::EmptyBaseMap);
        }
        let graph = densify(base, params.step);
        let base_edges = graph.edge_ids().collect();
        // lowest id ends up on top
        let stack = graph.vertex_ids().collect::<Vec<_>>().into_iter().rev().collect();
        Ok(Self::with_graph(field, graph, stack, base_edges, params))
    }

    fn with_graph(
        field: &'f DirectionField,
        graph: RoadGraph,
        stack: Vec<VertexId>,
        base_edges: BTreeSet<EdgeId>,
        params: SearchParams,
    ) -> Self {
        let base_vertices = if base_edges.is_empty() {
            HashSet::new()
        } else {
            graph.vertex_ids().collect()
        };
        SearchState {
            index: PointIndex::from_graph(&graph, params.merge_radius),
            heading: HashMap::new(),
            max_steps: params.step_budget(field),
            graph,
            stack,
            field,
            params,
            base_edges,
            base_vertices,
            stats: SearchStats::default(),
        }
    }

    pub fn graph(&self) -> &RoadGraph {
        &self.graph
    }

    pub fn stack(&self) -> &[VertexId] {
        &self.stack
    }

    pub fn base_edges(&self) -> &BTreeSet<EdgeId> {
        &self.base_edges
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    fn bucket_toward(&self, from: Point, to: Point) -> Option<usize> {
        let v = to - from;
        (v.norm() > 0.0).then(|| self.field.grid().bucket_of(v.angle()))
    }

    /// Field vector at the top vertex with explored directions zeroed:
    /// directions of incident edges and directions toward every vertex
    /// within `hop_exclusion` hops.
    pub fn mask_directions(&self) -> Vec<f32> {
        let top = *self.stack.last().expect("mask_directions on empty stack");
        self.masked_at(top)
    }

    fn masked_at(&self, top: VertexId) -> Vec<f32> {
        let here = self.graph.pos(top);
        let mut u = self.field.lookup(here);
        let b = u.len() as i64;
        let w = self.params.mask_halfwidth as i64;
        let mut zero_around = |a: usize| {
            for k in -w..=w {
                u[(a as i64 + k).rem_euclid(b) as usize] = 0.0;
            }
        };
        for &(n, _) in self.graph.neighbors(top) {
            if let Some(a) = self.bucket_toward(here, self.graph.pos(n)) {
                zero_around(a);
            }
        }
        for n in self.graph.within_hops(top, self.params.hop_exclusion) {
            if n == top {
                continue;
            }
            if let Some(a) = self.bucket_toward(here, self.graph.pos(n)) {
                zero_around(a);
            }
        }
        u
    }

    /// Strongest bucket. Ties go to the bucket closest to `heading`, then
    /// to the lowest index.
    fn argmax(&self, u: &[f32], heading: Option<usize>) -> (usize, f32) {
        let b = u.len();
        let turn = |k: usize| match heading {
            Some(h) => {
                let d = (k + b - h) % b;
                d.min(b - d)
            }
            None => 0,
        };
        let mut best = (0, f32::NEG_INFINITY);
        for (k, &v) in u.iter().enumerate() {
            if v > best.1 || (v == best.1 && turn(k) < turn(best.0)) {
                best = (k, v);
            }
        }
        best
    }

    /// Vertex the fresh tip `v` should join, if any: within the merge
    /// radius, outside the hop neighborhood, already part of a traced road,
    /// and no more than the mask half-width off the extension direction.
    /// The best aligned candidate wins, then the nearest, then the lowest id.
    fn merge_target(&self, v: VertexId, heading: f64) -> Option<(VertexId, f64)> {
        let p = self.graph.pos(v);
        let near = self.graph.within_hops(v, self.params.hop_exclusion);
        let cone = self.params.mask_halfwidth as f64 * TAU / self.field.grid().buckets as f64;
        self.index
            .within(p, self.params.merge_radius)
            .into_iter()
            .filter(|(u, _)| !near.contains(u) && self.graph.degree(*u) > 0)
            .map(|(u, d)| {
                let off = normalize_angle((self.graph.pos(u) - p).angle() - heading);
                (u, d, off.min(TAU - off))
            })
            .filter(|&(_, _, off)| off <= cone + 1e-9)
            .min_by(|a, b| a.2.total_cmp(&b.2).then(a.1.total_cmp(&b.1)).then(a.0.cmp(&b.0)))
            .map(|(u, d, _)| (u, d))
    }

    fn pop(&mut self) -> VertexId {
        let v = self.stack.pop().expect("pop on empty stack");
        self.stats.popped += 1;
        v
    }

    pub fn step(&mut self) -> StepEvent {
        let Some(&top) = self.stack.last() else {
            return StepEvent::Terminated;
        };
        if self.stats.steps >= self.max_steps {
            self.stats.hit_step_limit = true;
            return StepEvent::Terminated;
        }
        self.stats.steps += 1;

        let masked = self.masked_at(top);
        let (best, best_val) = self.argmax(&masked, self.heading.get(&top).copied());
        if best_val < self.params.threshold {
            self.pop();
            return StepEvent::Popped(top);
        }

        let here = self.graph.pos(top);
        if self.graph.degree(top) == 0 && !self.base_vertices.contains(&top) {
            let crowded = self
                .index
                .within(here, self.params.merge_radius)
                .into_iter()
                .any(|(v, _)| v != top && self.graph.degree(v) > 0);
            if crowded {
                // an isolated seed on an already traced road adds nothing
                self.pop();
                self.stats.dropped_seeds += 1;
                self.graph.remove_vertex(top);
                self.index.remove(top, here);
                return StepEvent::Popped(top);
            }
        }

        let angle = self.field.grid().bucket_center(best);
        let p = here + Point::unit(angle) * self.params.step;
        let v = self.graph.add_vertex(p);
        let edge = self
            .graph
            .add_edge(top, v)
            .expect("extension edge to a fresh vertex is always new");
        self.index.insert(v, p);
        self.heading.insert(v, best);
        self.stack.push(v);

        let target = self.merge_target(v, angle);
        match target {
            Some((u, _)) => {
                let edge = self
                    .graph
                    .add_edge(v, u)
                    .expect("merge target lies outside the hop neighborhood, so no edge exists");
                self.stack.pop();
                self.stats.merged += 1;
                StepEvent::Merged {
                    vertex: v,
                    target: u,
                    edge,
                }
            }
            None => {
                self.stats.extended += 1;
                StepEvent::Extended {
                    from: top,
                    vertex: v,
                    edge,
                }
            }
        }
    }

    /// Steps until the stack empties or the step budget runs out.
    pub fn run(mut self) -> SearchOutcome {
        while self.step() != StepEvent::Terminated {}
        if self.stats.hit_step_limit {
            log::warn!(
                "search stopped at the step limit ({} steps) with {} vertices still stacked",
                self.max_steps,
                self.stack.len()
            );
        }
        SearchOutcome {
            graph: self.graph,
            base_edges: self.base_edges,
            stats: self.stats,
        }
    }
}

/// Removes base edges (and vertices left without edges) from a merged
/// graph. Vertices where inferred edges meet the base map are kept, so the
/// result shares them by id with the base.
pub fn extract_inferred(merged: &RoadGraph, base_edges: &BTreeSet<EdgeId>) -> RoadGraph {
    merged.edge_subgraph(merged.edge_ids().filter(|e| !base_edges.contains(e)))
}
