//! HTTP front end. Routes, bodies and status codes are listed in
//! `docs/api.md`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tokio::net::TcpListener;

use crate::api::{ErrorBody, API_FORMAT_VERSION};
use crate::{ServiceError, StudyService};

pub fn status_of(e: &ServiceError) -> StatusCode {
    match e {
        ServiceError::UnknownParticipant(_) | ServiceError::UnknownSnippet(_) | ServiceError::UnknownSession(_) => {
            StatusCode::NOT_FOUND
        }
        ServiceError::NotAssigned { .. } => StatusCode::FORBIDDEN,
        ServiceError::DuplicateParticipant(_)
        | ServiceError::CorpusExhausted { .. }
        | ServiceError::AlreadyClosed(_)
        | ServiceError::OutOfOrderBatch { .. } => StatusCode::CONFLICT,
        ServiceError::StaleSession(_) => StatusCode::GONE,
        ServiceError::MalformedEvent { .. } | ServiceError::EmptySession | ServiceError::InvalidSubmission(_) => {
            StatusCode::UNPROCESSABLE_ENTITY
        }
        ServiceError::UnsupportedVersion(_) | ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
        ServiceError::Config(_)
        | ServiceError::Corpus(_)
        | ServiceError::Storage(_)
        | ServiceError::Corrupt { .. } => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

struct ApiError(ServiceError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = status_of(&self.0);
        if status.is_server_error() {
            tracing::error!(error = %self.0, "request failed");
        }
        let body = ErrorBody {
            format_version: API_FORMAT_VERSION,
            error: self.0.code().to_owned(),
            message: self.0.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<(StatusCode, Json<T>), ApiError>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError(ServiceError::BadRequest(e.to_string())))
}

/// Runs blocking service work (locks, file syncs) off the async workers.
async fn blocking<T, F>(svc: Arc<StudyService>, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&StudyService) -> Result<T, ServiceError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&svc))
        .await
        .map_err(|e| ApiError(ServiceError::Storage(std::io::Error::other(e))))?
        .map_err(ApiError)
}

fn ok<T: Serialize>(status: StatusCode, v: T) -> ApiResult<T> {
    Ok((status, Json(v)))
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "format_version": API_FORMAT_VERSION, "status": "ok" }))
}

async fn register(State(svc): State<Arc<StudyService>>, body: Bytes) -> ApiResult<crate::api::Participant> {
    let req = parse(&body)?;
    ok(StatusCode::CREATED, blocking(svc, move |s| s.register(req)).await?)
}

async fn tasks(State(svc): State<Arc<StudyService>>, Path(pid): Path<String>) -> ApiResult<crate::api::TaskList> {
    ok(StatusCode::OK, blocking(svc, move |s| s.tasks(&pid)).await?)
}

async fn open_session(State(svc): State<Arc<StudyService>>, body: Bytes) -> ApiResult<crate::api::SessionInfo> {
    let req = parse(&body)?;
    let (info, created) = blocking(svc, move |s| s.open_session(req)).await?;
    ok(if created { StatusCode::CREATED } else { StatusCode::OK }, info)
}

async fn append(
    State(svc): State<Arc<StudyService>>,
    Path(token): Path<String>,
    body: Bytes,
) -> ApiResult<crate::api::Ack> {
    let batch = parse(&body)?;
    ok(StatusCode::OK, blocking(svc, move |s| s.append_events(&token, batch)).await?)
}

async fn submit(
    State(svc): State<Arc<StudyService>>,
    Path(token): Path<String>,
    body: Bytes,
) -> ApiResult<crate::api::Submitted> {
    let req = parse(&body)?;
    ok(StatusCode::OK, blocking(svc, move |s| s.submit(&token, req)).await?)
}

pub fn router(service: Arc<StudyService>) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/participants", post(register))
        .route("/v1/participants/{participant_id}/tasks", get(tasks))
        .route("/v1/sessions", post(open_session))
        .route("/v1/sessions/{session_token}/events", post(append))
        .route("/v1/sessions/{session_token}/submit", post(submit))
        .with_state(service)
}

/// Serves until the listener fails or the task is cancelled.
pub async fn serve(listener: TcpListener, service: Arc<StudyService>) -> std::io::Result<()> {
    axum::serve(listener, router(service)).await
}

/// Binds the configured address and serves.
pub async fn run(service: StudyService) -> std::io::Result<()> {
    let addr: SocketAddr = service.config().listen;
    let listener = TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "study service listening");
    serve(listener, Arc::new(service)).await
}
