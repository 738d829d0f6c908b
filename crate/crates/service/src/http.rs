//! HTTP API over a loaded lexicon.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mdt_core::lexicon::serialize_groups;
use mdt_core::xfer::{translate, TranslateOptions};
use mdt_core::Lexicon;
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;

use crate::accept::{AcceptError, AcceptanceLog, AcceptanceRecord};

pub struct AppState {
    pub lexicon: Lexicon,
    pub target: String,
    pub log: AcceptanceLog,
}

#[derive(Deserialize)]
struct TranslateRequest {
    text: String,
    max: Option<usize>,
    #[serde(default)]
    trace: bool,
}

#[derive(Deserialize)]
struct AcceptRequest {
    #[serde(default)]
    source: String,
    chosen: String,
    #[serde(default)]
    offered: Vec<String>,
    session: Option<String>,
}

#[derive(Deserialize)]
struct GroupsQuery {
    head: String,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, String> {
    serde_json::from_slice(body).map_err(|e| format!("malformed body: {e}"))
}

async fn health(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "groups": state.lexicon.entries().len(),
        "rules": state.lexicon.rules().len(),
    }))
}

async fn translate_handler(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: TranslateRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    if req.text.trim().is_empty() {
        return error(StatusCode::UNPROCESSABLE_ENTITY, "text is empty");
    }
    let options = TranslateOptions {
        max_outputs: req.max,
        trace: req.trace,
        ..Default::default()
    };
    let lexicon = &state.lexicon;
    match translate(&req.text, lexicon, lexicon.source_lang(), &state.target, &options) {
        Ok(result) => Json(result).into_response(),
        Err(e) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
    }
}

async fn groups(State(state): State<Arc<AppState>>, Query(q): Query<GroupsQuery>) -> Response {
    let lexicon = &state.lexicon;
    let mut found = lexicon.entries_headed_by(&q.head);
    if found.is_empty() {
        found = lexicon.entries_headed_by(&q.head.to_lowercase());
    }
    if found.is_empty() {
        return error(StatusCode::NOT_FOUND, format!("no group headed by {}", q.head));
    }
    let entries: Vec<_> = found.iter().map(|&i| lexicon.entry(i).clone()).collect();
    (
        [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
        serialize_groups(&entries),
    )
        .into_response()
}

async fn accept(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: AcceptRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let record = AcceptanceRecord::new(req.source, req.chosen, req.offered, req.session);
    let edited = record.edited;
    let state = state.clone();
    let appended = tokio::task::spawn_blocking(move || state.log.append(&record)).await;
    match appended {
        Ok(Ok(id)) => Json(json!({ "id": id, "edited": edited })).into_response(),
        Ok(Err(AcceptError::EmptyChoice)) => error(StatusCode::UNPROCESSABLE_ENTITY, "chosen is empty"),
        Ok(Err(e)) => {
            tracing::error!("{e}");
            error(StatusCode::INTERNAL_SERVER_ERROR, "could not record acceptance")
        }
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn no_ui() -> Html<&'static str> {
    Html("<!doctype html><title>mdt</title><p>mdt service is running; no UI directory was given. See <code>/api/health</code>.</p>")
}

/// Routes under `/api`, plus static files from `ui` at `/` when given.
pub fn router(state: Arc<AppState>, ui: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/translate", post(translate_handler))
        .route("/api/groups", get(groups))
        .route("/api/accept", post(accept))
        .with_state(state);
    match ui {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(no_ui)),
    }
}
