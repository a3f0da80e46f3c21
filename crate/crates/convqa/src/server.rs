//! HTTP front end for the review store.
//!
//! | method | path                 | body / query              | response                          |
//! |--------|----------------------|---------------------------|-----------------------------------|
//! | GET    | `/api/sets`          | `reviewer`, `n` (def. 10) | `{sets, no_work_remaining}`       |
//! | POST   | `/api/verdicts`      | verdict JSON              | stored verdict; 400 / 404 on error|
//! | GET    | `/api/progress`      |                           | `{total, fully_reviewed, pending}`|
//! | GET    | `/api/export/clean`  |                           | set JSONL                         |
//! | GET    | `/images/...`        |                           | static image files                |
//! | GET    | `/`                  |                           | review UI bundle                  |

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Query, State};
use axum::http::{StatusCode, header};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::formats::{FactRecord, write_sets};
use crate::review::{ReviewError, ReviewStore, ReviewVerdict, VerdictSubmission};

pub const DEFAULT_BATCH: usize = 10;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<RwLock<ReviewStore>>,
}

#[derive(Debug, Deserialize)]
pub struct BatchQuery {
    pub reviewer: Option<String>,
    pub n: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ItemView {
    pub qa_index: usize,
    pub question: String,
    pub answer: String,
    pub kind: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SetView {
    pub set_id: String,
    pub image_id: String,
    pub image_url: String,
    pub fact: FactRecord,
    pub qas: Vec<ItemView>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BatchResponse {
    pub sets: Vec<SetView>,
    pub no_work_remaining: bool,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

fn error(status: StatusCode, kind: &str, message: impl ToString) -> Response {
    (
        status,
        Json(ErrorBody {
            error: kind.to_string(),
            message: message.to_string(),
        }),
    )
        .into_response()
}

fn review_error(e: ReviewError) -> Response {
    match e {
        ReviewError::UnknownTarget { .. } => error(StatusCode::NOT_FOUND, "UnknownTarget", e),
        ReviewError::MalformedVerdict(_) | ReviewError::EmptyBatch => {
            error(StatusCode::BAD_REQUEST, "MalformedVerdict", e)
        }
        ReviewError::NoWorkRemaining => error(StatusCode::OK, "NoWorkRemaining", e),
        other => error(StatusCode::INTERNAL_SERVER_ERROR, "Internal", other),
    }
}

fn image_url(image_id: &str) -> String {
    let encoded: String = image_id
        .bytes()
        .map(|b| match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' => (b as char).to_string(),
            _ => format!("%{b:02X}"),
        })
        .collect();
    format!("/images/{encoded}.jpg")
}

async fn get_sets(State(state): State<AppState>, Query(q): Query<BatchQuery>) -> Response {
    let Some(reviewer) = q.reviewer.filter(|r| !r.trim().is_empty()) else {
        return error(StatusCode::BAD_REQUEST, "MalformedRequest", "reviewer is required");
    };
    let n = q.n.unwrap_or(DEFAULT_BATCH);
    let store = state.store.read().expect("store lock");
    match store.assign_batch(&reviewer, n) {
        Ok(sets) => Json(BatchResponse {
            sets: sets
                .into_iter()
                .map(|s| SetView {
                    set_id: s.set_id().to_string(),
                    image_id: s.image_id().to_string(),
                    image_url: image_url(s.image_id()),
                    fact: FactRecord::from_fact(s.fact()),
                    qas: s
                        .qas()
                        .iter()
                        .enumerate()
                        .map(|(i, qa)| ItemView {
                            qa_index: i,
                            question: qa.question.clone(),
                            answer: qa.answer.clone(),
                            kind: qa.kind.as_str().to_string(),
                        })
                        .collect(),
                })
                .collect(),
            no_work_remaining: false,
        })
        .into_response(),
        Err(ReviewError::NoWorkRemaining) => Json(BatchResponse {
            sets: Vec::new(),
            no_work_remaining: true,
        })
        .into_response(),
        Err(e) => review_error(e),
    }
}

async fn post_verdict(State(state): State<AppState>, body: Result<Json<VerdictSubmission>, JsonRejection>) -> Response {
    let Json(submission) = match body {
        Ok(b) => b,
        Err(rejection) => return error(StatusCode::BAD_REQUEST, "MalformedVerdict", rejection.body_text()),
    };
    let result: Result<ReviewVerdict, ReviewError> = {
        let mut store = state.store.write().expect("store lock");
        store.submit(submission)
    };
    match result {
        Ok(v) => Json(v).into_response(),
        Err(e) => review_error(e),
    }
}

async fn get_progress(State(state): State<AppState>) -> Response {
    Json(state.store.read().expect("store lock").progress()).into_response()
}

async fn get_export(State(state): State<AppState>) -> Response {
    let body = write_sets(&state.store.read().expect("store lock").export_clean());
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response()
}

const PLACEHOLDER: &str = "<!doctype html><title>convqa review</title>\
<p>No review UI bundle is configured. Start the service with <code>--ui DIR</code>, \
or use the JSON API under <code>/api/</code>.</p>";

pub fn router(store: ReviewStore, images: Option<PathBuf>, ui: Option<PathBuf>) -> Router {
    let state = AppState {
        store: Arc::new(RwLock::new(store)),
    };
    let mut app = Router::new()
        .route("/api/sets", get(get_sets))
        .route("/api/verdicts", axum::routing::post(post_verdict))
        .route("/api/progress", get(get_progress))
        .route("/api/export/clean", get(get_export))
        .with_state(state);
    if let Some(dir) = images {
        app = app.nest_service("/images", ServeDir::new(dir));
    }
    match ui {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.route("/", get(|| async { Html(PLACEHOLDER) })),
    }
}

/// Serves until interrupted.
pub async fn serve(app: Router, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("review service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
