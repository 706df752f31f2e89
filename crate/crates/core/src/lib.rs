//! Machine-assisted road map editing.
//!
//! The pipeline: rasterize or load a per-cell road-direction field
//! ([`field`]), trace roads through it with an iterative stack search
//! ([`search`]), keep major roads with shortest-path pruning ([`prune`]),
//! rank unmapped components for teleport validation ([`teleport`]), and
//! evaluate results with TOPO and road geometry error ([`metrics`]).
//! [`server`] wraps all of it in a validation session service.

pub mod field;
pub mod geo;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod prune;
pub mod search;
pub mod server;
pub mod spatial;
pub mod synth;
pub mod teleport;

pub use geo::{Frame, Point};
pub use graph::{EdgeId, GraphPosition, RoadGraph, VertexId};
