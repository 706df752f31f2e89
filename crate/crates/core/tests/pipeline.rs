use std::collections::BTreeSet;

use proptest::prelude::*;

use mapassist::field::{extract_peaks, rasterize_gt_field, DirectionField, FieldGrid};
use mapassist::geo::{segment_distance, Frame, Point};
use mapassist::graph::RoadGraph;
use mapassist::prune::PruneParams;
use mapassist::search::{SearchParams, SearchState, StepEvent};
use mapassist::server::{Action, Session, SessionParams};
use mapassist::synth;

fn field_for(g: &RoadGraph) -> DirectionField {
    let grid = FieldGrid::covering(g.bbox().unwrap(), 2.0, 64, 40.0).unwrap();
    rasterize_gt_field(g, grid, 12.0, 20.0)
}

fn segment(a: Point, b: Point) -> RoadGraph {
    let mut g = RoadGraph::new(Frame::default());
    let (u, v) = (g.add_vertex(a), g.add_vertex(b));
    g.add_edge(u, v).unwrap();
    g
}

#[test]
fn straight_road_is_traced_in_steps() {
    let road = segment(Point::new(0.0, 0.0), Point::new(120.0, 0.0));
    let field = field_for(&road);
    let out = SearchState::from_seeds(&field, &[Point::new(0.0, 0.0)], Frame::default(), SearchParams::new(12.0, 0.5))
        .unwrap()
        .run();
    assert_eq!(out.stats.extended, 10);
    assert_eq!(out.graph.num_vertices(), 11);
    // steps follow bucket centers, half a bucket off the road's heading
    for (_, p) in out.graph.vertices() {
        assert!(p.y.abs() < 3.0 && p.x > -1.0 && p.x < 121.0, "{p:?}");
    }
}

#[test]
fn loop_closes_without_duplicates() {
    let ring = synth::square_loop(240.0);
    let field = field_for(&ring);
    let out = SearchState::from_seeds(&field, &[Point::new(120.0, 0.0)], Frame::default(), SearchParams::new(12.0, 0.5))
        .unwrap()
        .run();
    assert!(out.stats.merged >= 1);
    assert_eq!(out.graph.edge_pairs().len(), out.graph.num_edges());
    assert!(out.graph.vertex_ids().all(|v| out.graph.degree(v) == 2));
    assert!(!out.stats.hit_step_limit);
}

#[test]
fn zero_field_pops_each_seed_once() {
    let grid = FieldGrid::new(50, 50, 64, 2.0, Point::default()).unwrap();
    let field = DirectionField::zeros(grid);
    let seeds: Vec<Point> = (0..7).map(|k| Point::new(10.0 * k as f64, 5.0)).collect();
    let out = SearchState::from_seeds(&field, &seeds, Frame::default(), SearchParams::default())
        .unwrap()
        .run();
    assert_eq!(out.stats.popped, seeds.len());
    assert_eq!(out.stats.extended, 0);
    assert_eq!(out.graph.num_edges(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn traced_roads_follow_the_field(angle in 0.0..std::f64::consts::TAU, len in 60.0..240.0f64) {
        let a = Point::new(0.0, 0.0);
        let b = Point::unit(angle) * len;
        let road = segment(a, b);
        let field = field_for(&road);
        let seeds: Vec<Point> = extract_peaks(&field, 0.5, 24.0).iter().map(|p| p.point).collect();
        let mut s = SearchState::from_seeds(&field, &seeds, Frame::default(), SearchParams::new(12.0, 0.5)).unwrap();
        loop {
            match s.step() {
                StepEvent::Extended { edge, .. } => {
                    prop_assert!((s.graph().edge_length(edge) - 12.0).abs() <= 1e-6);
                }
                StepEvent::Merged { edge, .. } => {
                    prop_assert!(s.graph().edge_length(edge) <= 24.0 + 1e-9);
                }
                StepEvent::Popped(_) => {}
                StepEvent::Terminated => break,
            }
        }
        prop_assert!(!s.stats().hit_step_limit);
        let g = s.graph();
        prop_assert_eq!(g.edge_pairs().len(), g.num_edges());
        // labels reach the match distance (20 m) around the road, ends included
        for (_, p) in g.vertices().filter(|&(v, _)| g.degree(v) > 0) {
            prop_assert!(segment_distance(p, a, b) < 20.0 + 2.0, "{p:?} strays from the road");
        }
    }
}

/// Two street grids whose connecting road is missing from the base map.
#[test]
fn pruned_overlay_is_part_of_full_overlay() {
    let fixture = synth::barbell(200.0, 50.0, 2500.0, 250.0);
    let truth = &fixture.graph;
    let connector: BTreeSet<_> = fixture.connector.iter().copied().collect();
    let mut base = truth.edge_subgraph(truth.edge_ids().filter(|e| !connector.contains(e)));
    base.remove_isolated_vertices();

    let params = SessionParams {
        search: SearchParams::new(12.0, 0.5),
        prune: PruneParams {
            cell_size: 250.0,
            min_cell_vertices: 10,
            min_separation: 2000.0,
            trim: 200.0,
        },
        ..SessionParams::default()
    };
    let mut s = Session::build("barbell".into(), &base, &field_for(truth), params).unwrap();
    let full: BTreeSet<u64> = s.overlay(false).map(|x| x.id).collect();
    let pruned: BTreeSet<u64> = s.overlay(true).map(|x| x.id).collect();
    assert!(!pruned.is_empty());
    assert!(pruned.is_subset(&full));

    // major segments lie on the connector between the grids
    let (w, e) = fixture.connector_ends;
    for seg in s.overlay(true) {
        for &v in &seg.vertices {
            assert!(segment_distance(s.inferred().pos(v), w, e) < 4.0);
        }
    }

    let base_edges = s.base().num_edges();
    let accepted: usize = pruned
        .iter()
        .map(|&id| {
            s.act(id, Action::Accept).unwrap();
            s.segments()[id as usize].num_edges()
        })
        .sum();
    let exported = s.export_graph();
    assert_eq!(exported.num_edges(), base_edges + accepted);

    for id in full.difference(&pruned) {
        s.act(*id, Action::Reject).unwrap();
    }
    assert!(s.teleport().is_none());
    let everything = s.export_graph();
    assert_eq!(everything.edge_pairs(), exported.edge_pairs());
}
