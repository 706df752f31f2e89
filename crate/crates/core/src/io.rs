//! Graph file formats.
//!
//! `graph-json` is the native format:
//!
//! ```json
//! {"frame": {"lat0": 0.0, "lon0": 0.0},
//!  "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, ...],
//!  "edges": [[0, 1], ...]}
//! ```
//!
//! GeoJSON export writes each maximal chain of degree-2 vertices as a
//! `LineString` in WGS84 `[lon, lat]` order. Import splits LineStrings back
//! into edges and unifies coordinates that land within 1 cm of each other.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::geo::{Frame, GeoError, Point};
use crate::graph::{EdgeId, GraphError, RoadGraph, VertexId};
use crate::spatial::PointIndex;

/// Coordinates closer than this are treated as the same vertex on import.
pub const UNIFY_TOLERANCE: f64 = 0.01;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
    #[error("invalid coordinate: {0}")]
    Geo(#[from] GeoError),
    #[error("unsupported GeoJSON: {0}")]
    GeoJson(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    frame: Frame,
    nodes: Vec<NodeDoc>,
    edges: Vec<[u64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: u64,
    x: f64,
    y: f64,
}

pub fn graph_to_json(g: &RoadGraph) -> Value {
    let doc = GraphDoc {
        frame: g.frame(),
        nodes: g
            .vertices()
            .map(|(id, p)| NodeDoc {
                id: id.0,
                x: p.x,
                y: p.y,
            })
            .collect(),
        edges: g.edges().map(|(_, e)| [e.a.0, e.b.0]).collect(),
    };
    serde_json::to_value(doc).expect("graph document serializes")
}

/// Parses a graph-json document. Edge ids follow file order.
pub fn graph_from_json(v: Value) -> Result<RoadGraph, IoError> {
    let doc: GraphDoc = serde_json::from_value(v)?;
    Frame::new(doc.frame.lat0, doc.frame.lon0)?;
    let mut g = RoadGraph::new(doc.frame);
    for n in doc.nodes {
        g.insert_vertex(VertexId(n.id), Point::new(n.x, n.y))?;
    }
    for (i, [a, b]) in doc.edges.into_iter().enumerate() {
        g.insert_edge(EdgeId(i as u64), VertexId(a), VertexId(b))?;
    }
    Ok(g)
}

pub fn graph_to_string(g: &RoadGraph) -> String {
    serde_json::to_string(&graph_to_json(g)).expect("graph document serializes")
}

pub fn graph_from_str(s: &str) -> Result<RoadGraph, IoError> {
    graph_from_json(serde_json::from_str(s)?)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<RoadGraph, IoError> {
    graph_from_str(&fs::read_to_string(path)?)
}

pub fn write_graph(g: &RoadGraph, path: impl AsRef<Path>) -> Result<(), IoError> {
    fs::write(path, graph_to_string(g))?;
    Ok(())
}

/// Splits the edges of `g` into maximal chains through vertices of degree
/// exactly 2 that are not in `breaks`. Pure cycles start at their lowest
/// vertex id. Chains are returned as vertex sequences, ordered by their
/// first edge id.
pub fn chains(g: &RoadGraph, breaks: &HashSet<VertexId>) -> Vec<Vec<VertexId>> {
    let is_joint = |v: VertexId| g.degree(v) != 2 || breaks.contains(&v);
    let mut used: BTreeSet<EdgeId> = BTreeSet::new();
    let mut out = Vec::new();
    for (e, edge) in g.edges() {
        if used.contains(&e) {
            continue;
        }
        used.insert(e);
        // walk both directions from this edge until hitting a joint
        let walk = |start: VertexId, from_edge: EdgeId, used: &mut BTreeSet<EdgeId>| {
            let mut seq = vec![start];
            let mut cur = start;
            let mut via = from_edge;
            while !is_joint(cur) {
                let Some(&(next, ne)) = g.neighbors(cur).iter().find(|&&(_, ne)| ne != via) else {
                    break;
                };
                if !used.insert(ne) {
                    break;
                }
                seq.push(next);
                cur = next;
                via = ne;
            }
            seq
        };
        let forward = walk(edge.b, e, &mut used);
        let backward = walk(edge.a, e, &mut used);
        let mut chain: Vec<VertexId> = backward.into_iter().rev().collect();
        chain.extend(forward);
        // closed loop made only of plain vertices: rotate to lowest id
        if chain.len() > 2 && chain.first() == chain.last() && !is_joint(chain[0]) {
            chain.pop();
            let k = (0..chain.len()).min_by_key(|&i| chain[i]).unwrap();
            chain.rotate_left(k);
            chain.push(chain[0]);
        }
        out.push(chain);
    }
    out
}

pub fn graph_to_geojson(g: &RoadGraph) -> Result<Value, IoError> {
    let frame = g.frame();
    let mut features = Vec::new();
    for chain in chains(g, &HashSet::new()) {
        let coords = chain
            .iter()
            .map(|&v| {
                let (lat, lon) = frame.local_to_latlon(g.pos(v))?;
                Ok(json!([lon, lat]))
            })
            .collect::<Result<Vec<_>, GeoError>>()?;
        features.push(json!({
            "type": "Feature",
            "properties": {"nodes": chain.iter().map(|v| v.0).collect::<Vec<_>>()},
            "geometry": {"type": "LineString", "coordinates": coords},
        }));
    }
    Ok(json!({
        "type": "FeatureCollection",
        "frame": {"lat0": frame.lat0, "lon0": frame.lon0},
        "features": features,
    }))
}

fn frame_of(doc: &Value, lines: &[Vec<(f64, f64)>]) -> Result<Frame, IoError> {
    if let Some(f) = doc.get("frame") {
        let f: Frame = serde_json::from_value(f.clone())?;
        return Ok(Frame::new(f.lat0, f.lon0)?);
    }
    // no frame stored: center the projection on the data
    let pts: Vec<&(f64, f64)> = lines.iter().flatten().collect();
    if pts.is_empty() {
        return Ok(Frame::default());
    }
    let n = pts.len() as f64;
    let lon0 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let lat0 = pts.iter().map(|p| p.1).sum::<f64>() / n;
    Ok(Frame::new(lat0, lon0)?)
}

pub fn graph_from_geojson(doc: &Value) -> Result<RoadGraph, IoError> {
    let bad = |m: &str| IoError::GeoJson(m.to_string());
    let features = match doc.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => doc
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("FeatureCollection without features"))?
            .clone(),
        Some("Feature") => vec![doc.clone()],
        _ => return Err(bad("expected a FeatureCollection or Feature")),
    };
    let mut lines: Vec<Vec<(f64, f64)>> = Vec::new();
    for f in &features {
        let geom = f.get("geometry").ok_or_else(|| bad("feature without geometry"))?;
        let parts: Vec<&Value> = match geom.get("type").and_then(Value::as_str) {
            Some("LineString") => vec![geom.get("coordinates").ok_or_else(|| bad("no coordinates"))?],
            Some("MultiLineString") => geom
                .get("coordinates")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("no coordinates"))?
                .iter()
                .collect(),
            _ => continue,
        };
        for part in parts {
            let coords = part.as_array().ok_or_else(|| bad("coordinates must be an array"))?;
            let mut line = Vec::new();
            for c in coords {
                let lon = c.get(0).and_then(Value::as_f64);
                let lat = c.get(1).and_then(Value::as_f64);
                match (lon, lat) {
                    (Some(lon), Some(lat)) => line.push((lon, lat)),
                    _ => return Err(bad("position must be [lon, lat]")),
                }
            }
            lines.push(line);
        }
    }
    let frame = frame_of(doc, &lines)?;
    let mut g = RoadGraph::new(frame);
    let mut index = PointIndex::new(1.0);
    let mut vertex_at = |g: &mut RoadGraph, p: Point| {
        if let Some((v, _)) = index
            .within(p, UNIFY_TOLERANCE)
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        {
            return v;
        }
        let v = g.add_vertex(p);
        index.insert(v, p);
        v
    };
    for line in lines {
        let mut prev: Option<VertexId> = None;
        for (lon, lat) in line {
            let v = vertex_at(&mut g, frame.latlon_to_local(lat, lon)?);
            if let Some(u) = prev {
                if u != v && g.edge_between(u, v).is_none() {
                    g.add_edge(u, v)?;
                }
            }
            prev = Some(v);
        }
    }
    Ok(g)
}

pub fn read_geojson(path: impl AsRef<Path>) -> Result<RoadGraph, IoError> {
    graph_from_geojson(&serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_geojson(g: &RoadGraph, path: impl AsRef<Path>) -> Result<(), IoError> {
    fs::write(path, serde_json::to_string(&graph_to_geojson(g)?)?)?;
    Ok(())
}

/// Reads either format, choosing by extension (`.geojson` or graph-json).
pub fn read_any(path: impl AsRef<Path>) -> Result<RoadGraph, IoError> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("geojson") => read_geojson(path),
        _ => read_graph(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn graph_json_round_trip_is_exact() {
        let mut g = synth::grid_city();
        g.set_frame(Frame::new(47.6062, -122.3321).unwrap());
        let odd = g.add_vertex(Point::new(0.1 + 0.2, 1.0 / 3.0));
        g.add_edge(odd, VertexId(0)).unwrap();
        let back = graph_from_str(&graph_to_string(&g)).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.pos(odd), g.pos(odd));
    }

    #[test]
    fn graph_json_rejects_bad_edges() {
        let s = r#"{"frame":{"lat0":0,"lon0":0},"nodes":[{"id":1,"x":0,"y":0}],"edges":[[1,2]]}"#;
        assert!(matches!(
            graph_from_str(s),
            Err(IoError::Graph(GraphError::UnknownVertex(VertexId(2))))
        ));
        let s = r#"{"frame":{"lat0":0,"lon0":0},"nodes":[{"id":1,"x":0,"y":0},{"id":1,"x":1,"y":0}],"edges":[]}"#;
        assert!(matches!(graph_from_str(s), Err(IoError::Graph(GraphError::DuplicateVertex(_)))));
        assert!(matches!(graph_from_str("{"), Err(IoError::Json(_))));
    }

    #[test]
    fn chains_split_at_junctions() {
        // T junction: three chains
        let mut g = RoadGraph::new(Frame::default());
        let c = g.add_vertex(Point::new(0.0, 0.0));
        for dir in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0)] {
            let mut prev = c;
            for k in 1..=3 {
                let v = g.add_vertex(Point::new(dir.0 * k as f64, dir.1 * k as f64));
                g.add_edge(prev, v).unwrap();
                prev = v;
            }
        }
        let ch = chains(&g, &HashSet::new());
        assert_eq!(ch.len(), 3);
        assert!(ch.iter().all(|c| c.len() == 4));
        let loop_chains = chains(&synth::square_loop(10.0), &HashSet::new());
        assert_eq!(loop_chains, vec![vec![VertexId(0), VertexId(1), VertexId(2), VertexId(3), VertexId(0)]]);
    }

    #[test]
    fn geojson_round_trip_positions() {
        let mut g = synth::grid_with_avenues(4, 100.0);
        g.set_frame(Frame::new(-6.2, 106.8).unwrap());
        let doc = graph_to_geojson(&g).unwrap();
        let back = graph_from_geojson(&doc).unwrap();
        assert_eq!(back.num_vertices(), g.num_vertices());
        assert_eq!(back.num_edges(), g.num_edges());
        let idx = PointIndex::from_graph(&back, 1.0);
        for (_, p) in g.vertices() {
            assert!(!idx.within(p, 0.01).is_empty());
        }
    }

    #[test]
    fn geojson_unifies_shared_endpoints() {
        let doc = json!({
            "type": "FeatureCollection",
            "features": [
                {"type": "Feature", "properties": {}, "geometry": {"type": "LineString",
                    "coordinates": [[0.0, 0.0], [0.001, 0.0]]}},
                {"type": "Feature", "properties": {}, "geometry": {"type": "LineString",
                    "coordinates": [[0.001, 0.0], [0.001, 0.001]]}},
            ]
        });
        let g = graph_from_geojson(&doc).unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 2);
    }
}
