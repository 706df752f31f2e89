//! JSON-over-HTTP interface.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::field::read_field;
use crate::io::{graph_to_geojson, graph_to_json, read_any};

use super::session::{Action, Session, SessionParams};
use super::store::SessionStore;
use super::ServerError;

impl IntoResponse for ServerError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServerError::UnknownSession(_) | ServerError::UnknownSegment(_) => StatusCode::NOT_FOUND,
            ServerError::Conflict { .. } => StatusCode::CONFLICT,
            ServerError::FrameMismatch => StatusCode::UNPROCESSABLE_ENTITY,
            ServerError::Base(_)
            | ServerError::Field(_)
            | ServerError::Params(_)
            | ServerError::UnknownFormat(_) => StatusCode::BAD_REQUEST,
            ServerError::Storage(_) | ServerError::Corrupt { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            log::error!("{self}");
        }
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

type ApiResult = Result<Json<Value>, ServerError>;

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}/overlay", get(overlay))
        .route("/sessions/{id}/segments/{sid}/{action}", post(act))
        .route("/sessions/{id}/teleport", post(teleport))
        .route("/sessions/{id}/export", get(export))
        .route("/sessions/{id}/status", get(status))
        .with_state(store)
}

/// Serves `store` on `addr` until the process is stopped.
pub async fn serve(addr: SocketAddr, store: Arc<SessionStore>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store)).await
}

#[derive(Deserialize)]
struct CreateRequest {
    /// Base map, graph-json or GeoJSON.
    base: PathBuf,
    field: PathBuf,
    #[serde(default)]
    params: SessionParams,
}

async fn create(
    State(store): State<Arc<SessionStore>>,
    Json(req): Json<CreateRequest>,
) -> Result<(StatusCode, Json<Value>), ServerError> {
    let task = tokio::task::spawn_blocking(move || {
        let base = read_any(&req.base).map_err(ServerError::Base)?;
        let field = read_field(&req.field).map_err(ServerError::Field)?;
        let id = store.create(&base, &field, req.params)?;
        store.read(&id, status_body)
    });
    let body = task.await.map_err(|e| std::io::Error::other(e.to_string()))??;
    Ok((StatusCode::CREATED, Json(body)))
}

async fn list(State(store): State<Arc<SessionStore>>) -> Json<Value> {
    Json(json!({ "sessions": store.ids() }))
}

#[derive(Deserialize)]
struct OverlayQuery {
    pruned: Option<String>,
}

async fn overlay(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    Query(q): Query<OverlayQuery>,
) -> ApiResult {
    let pruned = match q.pruned.as_deref() {
        None | Some("0") | Some("false") => false,
        Some("1") | Some("true") => true,
        Some(other) => return Err(ServerError::Params(format!("pruned must be 0 or 1, got {other:?}"))),
    };
    store.read(&id, |s| {
        let frame = s.base().frame();
        let segments: Vec<Value> = s
            .overlay(pruned)
            .map(|seg| {
                let points: Vec<[f64; 2]> = seg
                    .vertices
                    .iter()
                    .map(|&v| {
                        let p = s.inferred().pos(v);
                        [p.x, p.y]
                    })
                    .collect();
                let lonlat: Vec<[f64; 2]> = seg
                    .vertices
                    .iter()
                    .filter_map(|&v| frame.local_to_latlon(s.inferred().pos(v)).ok())
                    .map(|(lat, lon)| [lon, lat])
                    .collect();
                json!({
                    "id": seg.id,
                    "status": seg.status,
                    "pruned": seg.pruned,
                    "points": points,
                    "lonlat": lonlat,
                })
            })
            .collect();
        Json(json!({
            "session": s.id(),
            "pruned": pruned,
            "frame": frame,
            "segments": segments,
        }))
    })
}

async fn act(
    State(store): State<Arc<SessionStore>>,
    Path((id, sid, action)): Path<(String, u64, String)>,
) -> Result<Response, ServerError> {
    let action = match action.as_str() {
        "accept" => Action::Accept,
        "reject" => Action::Reject,
        _ => return Ok(StatusCode::NOT_FOUND.into_response()),
    };
    let status = store.act(&id, sid, action)?;
    Ok(Json(json!({ "segment": sid, "status": status })).into_response())
}

async fn teleport(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult {
    let target = store.teleport(&id)?;
    Ok(Json(match target {
        None => json!({ "exhausted": true }),
        Some(t) => {
            let mut v = serde_json::to_value(&t).expect("teleport target serializes");
            v["exhausted"] = json!(false);
            v
        }
    }))
}

#[derive(Deserialize)]
struct ExportQuery {
    format: Option<String>,
}

async fn export(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    Query(q): Query<ExportQuery>,
) -> ApiResult {
    let format = q.format.unwrap_or_else(|| "graph-json".to_string());
    let g = store.read(&id, |s| s.export_graph())?;
    match format.as_str() {
        "graph-json" => Ok(Json(graph_to_json(&g))),
        "geojson" => graph_to_geojson(&g)
            .map(Json)
            .map_err(|e| ServerError::Params(e.to_string())),
        _ => Err(ServerError::UnknownFormat(format)),
    }
}

async fn status(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult {
    store.read(&id, status_body).map(Json)
}

fn status_body(s: &Session) -> Value {
    json!({
        "id": s.id(),
        // inference finishes before a session is registered
        "state": "ready",
        "segments": s.counts(),
        "teleport": {
            "position": s.cursor_position(),
            "components": s.ranked().len(),
        },
        "base_edges": s.base().num_edges(),
        "inferred_edges": s.inferred().num_edges(),
        "search": s.stats(),
        "params": s.params(),
    })
}
