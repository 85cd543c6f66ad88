use std::str::FromStr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use ergm_core::io::{parse_attributes, parse_network, NetworkFormat, SCHEMA_VERSION, TOOL_VERSION};
use ergm_core::Error;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::engine::Network;
use crate::jobs::{JobRequest, Store, StoreError};

/// Body of `POST /v1/networks`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkUpload {
    #[serde(default)]
    pub name: Option<String>,
    /// `auto`, `matrix` or `edgelist`.
    #[serde(default)]
    pub format: Option<String>,
    /// Adjacency matrix or edge list text.
    pub data: String,
    /// Optional `node,<attribute>` CSV text.
    #[serde(default)]
    pub attributes: Option<String>,
}

pub struct ApiError {
    status: StatusCode,
    class: &'static str,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, class: &'static str, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            class,
            code,
            message: message.into(),
        }
    }

    fn engine(status: StatusCode, e: &Error) -> Self {
        ApiError::new(status, e.class().as_str(), e.code(), e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::BadRequest(e) => ApiError::engine(StatusCode::BAD_REQUEST, &e),
            StoreError::Invalid(e) => ApiError::engine(StatusCode::UNPROCESSABLE_ENTITY, &e),
            StoreError::NotFound(what) => ApiError::new(StatusCode::NOT_FOUND, "usage", "not-found", format!("unknown {what}")),
            StoreError::Conflict(m) => ApiError::new(StatusCode::CONFLICT, "usage", "conflict", m),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": {"class": self.class, "code": self.code, "message": self.message}});
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn decode<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "data", "schema", e.to_string()))
}

fn document(text: Arc<str>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text.to_string()).into_response()
}

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/networks", get(list_networks).post(upload_network))
        .route("/v1/networks/{id}", get(get_network))
        .route("/v1/jobs", get(list_jobs).post(submit_job))
        .route("/v1/jobs/{id}", get(get_job).delete(cancel_job))
        .route("/v1/jobs/{id}/result", get(job_result))
        .route("/v1/jobs/{id}/plot-data", get(job_plot_data))
        .with_state(store)
}

async fn health(State(store): State<Store>) -> impl IntoResponse {
    Json(json!({
        "status": "ok",
        "version": TOOL_VERSION,
        "schema_version": SCHEMA_VERSION,
        "queue_depth": store.queue_depth(),
    }))
}

async fn upload_network(State(store): State<Store>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let upload: NetworkUpload = decode(&body)?;
    let bad = |e: Error| ApiError::engine(StatusCode::BAD_REQUEST, &e);
    let format = NetworkFormat::from_str(upload.format.as_deref().unwrap_or("auto")).map_err(bad)?;
    let loaded = parse_network(&upload.data, format).map_err(bad)?;
    let attrs = upload
        .attributes
        .as_deref()
        .map(|text| parse_attributes(text, Some(loaded.graph.node_count())))
        .transpose()
        .map_err(bad)?;
    let view = store.add_network(upload.name, Network::new(loaded.graph, attrs), loaded.warnings);
    Ok((StatusCode::CREATED, Json(view)))
}

async fn list_networks(State(store): State<Store>) -> impl IntoResponse {
    Json(store.networks())
}

async fn get_network(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    store
        .network(&id)
        .map(Json)
        .ok_or_else(|| StoreError::NotFound(format!("network `{id}`")).into())
}

async fn submit_job(State(store): State<Store>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let request: JobRequest = decode(&body)?;
    let view = store.submit(request)?;
    Ok((StatusCode::ACCEPTED, Json(view)))
}

async fn list_jobs(State(store): State<Store>) -> impl IntoResponse {
    Json(store.jobs())
}

async fn get_job(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    store
        .job(&id)
        .map(Json)
        .ok_or_else(|| StoreError::NotFound(format!("job `{id}`")).into())
}

async fn cancel_job(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.cancel(&id)?))
}

async fn job_result(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(document(store.result(&id)?))
}

async fn job_plot_data(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(document(store.plot_data(&id)?))
}
