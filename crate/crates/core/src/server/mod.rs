//! Validation session service.
//!
//! A session loads a base map and a direction field, runs inference and
//! pruning once, then serves the inferred segments for accept/reject
//! decisions, drives the teleport cursor and exports the edited map.
//! Sessions persist as a snapshot plus an append-only action log.

mod http;
mod session;
mod store;

pub use http::{router, serve};
pub use session::{
    Action, Segment, SegmentStatus, Session, SessionParams, StatusCounts, TeleportTarget,
};
pub use store::SessionStore;

use crate::field::FieldError;
use crate::io::IoError;

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("unknown segment {0}")]
    UnknownSegment(u64),
    #[error("segment {segment} is already {status}")]
    Conflict { segment: u64, status: SegmentStatus },
    #[error("base map does not overlap the direction field; are they in the same frame?")]
    FrameMismatch,
    #[error("cannot read base map: {0}")]
    Base(IoError),
    #[error("cannot read direction field: {0}")]
    Field(FieldError),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("unknown export format {0:?}, expected graph-json or geojson")]
    UnknownFormat(String),
    #[error("storage error: {0}")]
    Storage(#[from] std::io::Error),
    #[error("corrupt session data in {path}: {reason}")]
    Corrupt { path: String, reason: String },
}
