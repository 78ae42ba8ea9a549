// Copyright 2026 The urlpara Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! HTTP/JSON front end of the annotation store.

use std::path::Path;
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;
use urlpara::annotate::{AnnotationTask, Store, SubmitReport, WorkerStats};
use urlpara::corpus::{write_labeled_tsv, VoteThresholds};

/// Shared service state. Every write goes through the one store behind the
/// lock, so submissions are applied to the log one at a time.
pub struct AppState {
    pub store: RwLock<Store>,
}

impl AppState {
    pub fn new(store: Store) -> Arc<Self> {
        Arc::new(AppState {
            store: RwLock::new(store),
        })
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn poisoned() -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "store lock poisoned")
    }
}

impl From<urlpara::Error> for ApiError {
    fn from(e: urlpara::Error) -> Self {
        let status = match e {
            urlpara::Error::Auth(_) => StatusCode::FORBIDDEN,
            urlpara::Error::Argument(_) | urlpara::Error::Format { .. } | urlpara::Error::Config(_) => {
                StatusCode::BAD_REQUEST
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, e.body_text())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(e.status(), e.body_text())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: &self.message })).into_response()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateView {
    pub pair_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskView {
    pub task_id: String,
    pub original: String,
    pub candidates: Vec<CandidateView>,
}

impl From<AnnotationTask> for TaskView {
    fn from(t: AnnotationTask) -> Self {
        TaskView {
            task_id: t.task_id,
            original: t.original,
            candidates: t
                .candidates
                .into_iter()
                .map(|c| CandidateView {
                    pair_id: c.pair_id,
                    text: c.s2,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TasksResponse {
    pub tasks: Vec<TaskView>,
}

#[derive(Debug, Deserialize)]
pub struct TasksQuery {
    pub worker: String,
    #[serde(default = "default_batch")]
    pub batch: usize,
}

fn default_batch() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelItem {
    pub pair_id: String,
    pub label: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelsRequest {
    pub worker: String,
    pub labels: Vec<LabelItem>,
}

#[derive(Debug, Deserialize)]
pub struct ExportQuery {
    pub pos_min: Option<u32>,
    pub neg_max: Option<u32>,
}

/// Largest batch a client may request at once.
pub const MAX_BATCH: usize = 100;

async fn get_tasks(
    State(state): State<Arc<AppState>>,
    query: Result<Query<TasksQuery>, QueryRejection>,
) -> Result<Json<TasksResponse>, ApiError> {
    let Query(q) = query?;
    if q.batch == 0 || q.batch > MAX_BATCH {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("batch must be in 1..={MAX_BATCH}"),
        ));
    }
    let store = state.store.read().map_err(|_| ApiError::poisoned())?;
    let tasks = store.next_tasks(&q.worker, q.batch)?;
    Ok(Json(TasksResponse {
        tasks: tasks.into_iter().map(TaskView::from).collect(),
    }))
}

fn now() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs() as i64)
}

async fn post_labels(
    State(state): State<Arc<AppState>>,
    body: Result<Json<LabelsRequest>, JsonRejection>,
) -> Result<Json<SubmitReport>, ApiError> {
    let Json(req) = body?;
    let labels: Vec<(String, bool)> = req.labels.into_iter().map(|l| (l.pair_id, l.label)).collect();
    let mut store = state.store.write().map_err(|_| ApiError::poisoned())?;
    let report = store.submit_labels(&req.worker, &labels, now())?;
    log::info!(
        "{}: accepted {}, rejected {}",
        req.worker,
        report.accepted,
        report.rejected.len()
    );
    Ok(Json(report))
}

async fn get_export(
    State(state): State<Arc<AppState>>,
    query: Result<Query<ExportQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let defaults = VoteThresholds::default();
    let thresholds = VoteThresholds {
        pos_min: q.pos_min.unwrap_or(defaults.pos_min),
        neg_max: q.neg_max.unwrap_or(defaults.neg_max),
    };
    let dataset = {
        let store = state.store.read().map_err(|_| ApiError::poisoned())?;
        store.export_gold(thresholds)?
    };
    let mut buf = Vec::new();
    write_labeled_tsv(&dataset, &mut buf)?;
    Ok((
        [
            (header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8"),
            (header::CONTENT_DISPOSITION, "attachment; filename=\"annotations.tsv\""),
        ],
        buf,
    )
        .into_response())
}

async fn get_worker_stats(
    State(state): State<Arc<AppState>>,
    UrlPath(worker): UrlPath<String>,
) -> Result<Json<WorkerStats>, ApiError> {
    let store = state.store.read().map_err(|_| ApiError::poisoned())?;
    Ok(Json(store.worker_kappa(&worker)?))
}

/// The API routes, plus static files from `static_dir` for everything else.
pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/tasks", get(get_tasks))
        .route("/api/labels", post(post_labels))
        .route("/api/export", get(get_export))
        .route("/api/workers/{worker}/stats", get(get_worker_stats))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no such endpoint") }),
    }
}

/// Serves until interrupted.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
            log::info!("shutting down");
        })
        .await
}
