//! Ranking inferred components for the teleport workflow.
//!
//! Each connected component of the inferred graph is scored by the area of
//! its convex hull plus `lambda` times the number of vertices it shares
//! with the existing map. A cursor then walks the components best first.

use crate::geo::BBox;
use crate::graph::{connected_components, convex_hull_area, RoadGraph, VertexId};

/// Default weight of one connection to the existing map, in m².
pub const DEFAULT_LAMBDA: f64 = 1e6;

/// Margin added around a component's extent for viewport fitting, meters.
pub const BBOX_PADDING: f64 = 100.0;

#[derive(Debug, Clone)]
pub struct RankedComponent {
    pub component: RoadGraph,
    /// Convex hull area of the component's vertices, m².
    pub area: f64,
    /// Vertices shared with the existing map.
    pub conn: usize,
    pub score: f64,
    /// Padded extent of the component.
    pub bbox: BBox,
}

impl RankedComponent {
    /// Smallest vertex id, used to break score ties.
    pub fn min_vertex(&self) -> VertexId {
        self.component
            .vertex_ids()
            .next()
            .expect("components are never empty")
    }
}

/// Components of `inferred`, best first. Equal scores go to the component
/// with the smaller vertex id.
pub fn score_components(inferred: &RoadGraph, g0: &RoadGraph, lambda: f64) -> Vec<RankedComponent> {
    assert!(lambda >= 0.0, "lambda must be non-negative");
    let mut ranked: Vec<RankedComponent> = connected_components(inferred)
        .into_iter()
        .map(|component| {
            let area = convex_hull_area(&component);
            let conn = component
                .vertex_ids()
                .filter(|&v| g0.contains_vertex(v))
                .count();
            let bbox = component
                .bbox()
                .expect("components are never empty")
                .padded(BBOX_PADDING);
            RankedComponent {
                score: area + lambda * conn as f64,
                component,
                area,
                conn,
                bbox,
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.min_vertex().cmp(&b.min_vertex()))
    });
    ranked
}

/// Walks a ranked list once, best first.
#[derive(Debug, Clone)]
pub struct TeleportCursor {
    ranked: Vec<RankedComponent>,
    position: usize,
}

impl TeleportCursor {
    pub fn new(ranked: Vec<RankedComponent>) -> Self {
        TeleportCursor { ranked, position: 0 }
    }

    /// Resumes a cursor that had already handed out `position` components.
    pub fn resume(ranked: Vec<RankedComponent>, position: usize) -> Self {
        let position = position.min(ranked.len());
        TeleportCursor { ranked, position }
    }

    pub fn ranked(&self) -> &[RankedComponent] {
        &self.ranked
    }

    /// Components handed out or skipped so far.
    pub fn position(&self) -> usize {
        self.position
    }

    /// Moves the cursor back to an earlier position.
    pub fn rewind(&mut self, position: usize) {
        self.position = position.min(self.position);
    }

    pub fn is_exhausted(&self) -> bool {
        self.position >= self.ranked.len()
    }

    /// Highest-scored component not yet visited, or `None` once every
    /// component has been visited.
    pub fn next_component(&mut self) -> Option<&RankedComponent> {
        self.next_unresolved(|_, _| false)
    }

    /// Like [`next_component`](Self::next_component), but components for
    /// which `resolved(rank, component)` holds are marked visited and
    /// passed over.
    pub fn next_unresolved<F>(&mut self, mut resolved: F) -> Option<&RankedComponent>
    where
        F: FnMut(usize, &RankedComponent) -> bool,
    {
        while self.position < self.ranked.len() {
            let k = self.position;
            self.position += 1;
            if !resolved(k, &self.ranked[k]) {
                return Some(&self.ranked[k]);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{Frame, Point};

    fn square(g: &mut RoadGraph, x: f64, y: f64, side: f64) -> Vec<VertexId> {
        let ids: Vec<VertexId> = [(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)]
            .iter()
            .map(|&(dx, dy)| g.add_vertex(Point::new(x + dx, y + dy)))
            .collect();
        for k in 0..4 {
            g.add_edge(ids[k], ids[(k + 1) % 4]).unwrap();
        }
        ids
    }

    #[test]
    fn connections_outweigh_area() {
        let mut g = RoadGraph::new(Frame::default());
        // A: 1000 × 2000 m, B: 1000 × 1000 m, both as rectangles
        let a = square(&mut g, 0.0, 0.0, 1000.0);
        let extra = g.add_vertex(Point::new(0.0, 2000.0));
        let top = g.add_vertex(Point::new(1000.0, 2000.0));
        g.add_edge(a[3], extra).unwrap();
        g.add_edge(extra, top).unwrap();
        g.add_edge(top, a[2]).unwrap();
        let b = square(&mut g, 5000.0, 0.0, 1000.0);

        let mut g0 = RoadGraph::new(Frame::default());
        for &v in &[a[0], a[1], extra, b[0]] {
            g0.insert_vertex(v, g.pos(v)).unwrap();
        }
        let ranked = score_components(&g, &g0, 1e6);
        assert_eq!(ranked.len(), 2);
        assert_eq!((ranked[0].area, ranked[0].conn), (2e6, 3));
        assert_eq!(ranked[0].score, 5e6);
        assert_eq!(ranked[1].score, 2e6);

        let by_area = score_components(&g, &g0, 0.0);
        assert_eq!(by_area[0].min_vertex(), a[0]);
        assert_eq!(by_area[0].score, 2e6);
    }

    #[test]
    fn bbox_is_padded() {
        let mut g = RoadGraph::new(Frame::default());
        square(&mut g, 0.0, 0.0, 10.0);
        let r = &score_components(&g, &RoadGraph::default(), DEFAULT_LAMBDA)[0];
        assert_eq!(r.bbox.min, Point::new(-100.0, -100.0));
        assert_eq!(r.bbox.max, Point::new(110.0, 110.0));
    }

    #[test]
    fn equal_scores_keep_id_order() {
        let mut g = RoadGraph::new(Frame::default());
        let first = square(&mut g, 0.0, 0.0, 10.0)[0];
        square(&mut g, 100.0, 0.0, 10.0);
        let ranked = score_components(&g, &RoadGraph::default(), DEFAULT_LAMBDA);
        assert_eq!(ranked[0].min_vertex(), first);
    }

    #[test]
    fn cursor_walks_once() {
        let mut g = RoadGraph::new(Frame::default());
        for k in 0..3 {
            square(&mut g, 100.0 * k as f64, 0.0, 10.0 * (k + 1) as f64);
        }
        let mut c = TeleportCursor::new(score_components(&g, &RoadGraph::default(), 0.0));
        let areas: Vec<f64> = std::iter::from_fn(|| c.next_component().map(|r| r.area)).collect();
        assert_eq!(areas, vec![900.0, 400.0, 100.0]);
        assert!(c.next_component().is_none());
        assert!(c.is_exhausted());

        assert!(TeleportCursor::new(Vec::new()).next_component().is_none());
    }

    #[test]
    fn resolved_components_are_skipped() {
        let mut g = RoadGraph::new(Frame::default());
        for k in 0..3 {
            square(&mut g, 100.0 * k as f64, 0.0, 10.0 * (k + 1) as f64);
        }
        let mut c = TeleportCursor::new(score_components(&g, &RoadGraph::default(), 0.0));
        let got = c.next_unresolved(|_, r| r.area > 500.0).map(|r| r.area);
        assert_eq!(got, Some(400.0));
        assert_eq!(c.position(), 2);
    }
}
