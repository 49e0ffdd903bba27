//! HTTP routes. Every computed body is the JSON encoding of a core library
//! result; the handlers only pick inputs and serialize.

use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use touchscope_core::clustering::{
    kmeans, region_metrics, ConfidenceRegion, KMeansConfig, Side, UiMetrics,
};
use touchscope_core::layout::{RingRadii, SemanticMembership};
use touchscope_core::report::SessionSummary;
use touchscope_core::{
    build_layout_with_regions, confidence_region, event_points, heatmap, session_vectors,
    spatial_query, Area, DeviceProfile, DistanceConfig, EventFilter, LayoutConfig, Point,
    QueryMode, SemanticRegion, ValidationReport,
};

use crate::store::{content_hash, SessionStore, StoreError, StoredSession};

const MAX_UPLOAD_BYTES: usize = 256 * 1024 * 1024;

/// Defaults applied when a request leaves a parameter out.
#[derive(Debug, Clone, Copy)]
pub struct ServiceConfig {
    pub default_samples: usize,
    pub ring_radii: RingRadii,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            default_samples: touchscope_core::metrics::DEFAULT_SAMPLES,
            ring_radii: RingRadii::default(),
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    pub config: ServiceConfig,
}

/// Error body: `{"error": "<code>", "message": "..."}`.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
}

impl ApiError {
    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code: code.to_string(),
            message: message.into(),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let (status, code) = match &e {
            StoreError::NotFound(_) => (StatusCode::NOT_FOUND, "SessionNotFound".to_string()),
            StoreError::InvalidId(_) => (StatusCode::BAD_REQUEST, "InvalidSessionId".to_string()),
            StoreError::Busy(_) => (StatusCode::CONFLICT, "SessionBusy".to_string()),
            StoreError::Engine(inner) => (StatusCode::BAD_REQUEST, inner.code().to_string()),
            StoreError::Io(_) | StoreError::Regions { .. } => {
                (StatusCode::INTERNAL_SERVER_ERROR, "StoreIo".to_string())
            }
        };
        if status.is_server_error() {
            tracing::error!(error = %e, "store failure");
        }
        Self {
            status,
            code,
            message: e.to_string(),
        }
    }
}

impl From<touchscope_core::Error> for ApiError {
    fn from(e: touchscope_core::Error) -> Self {
        Self::bad_request(e.code(), e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request("InvalidRequest", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::bad_request("InvalidRequest", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code,
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn join_error(e: tokio::task::JoinError) -> ApiError {
    ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        code: "Internal".into(),
        message: e.to_string(),
    }
}

fn json_bytes(status: StatusCode, bytes: Arc<Vec<u8>>) -> Response {
    Response::builder()
        .status(status)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(bytes.as_ref().clone()))
        .expect("static response parts")
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    serde_json::to_vec(value).expect("engine types serialize")
}

fn params_hash<T: Serialize>(params: &T) -> String {
    content_hash(&to_json(params))
}

/// Run a deterministic computation through the response cache, off the
/// async workers.
async fn cached<P, T, F>(
    state: &AppState,
    stored: &StoredSession,
    endpoint: &'static str,
    params: &P,
    compute: F,
) -> ApiResult<Response>
where
    P: Serialize,
    T: Serialize,
    F: FnOnce(&StoredSession) -> Result<T, touchscope_core::Error> + Send + 'static,
{
    let store = state.store.clone();
    let stored = stored.clone();
    let key = params_hash(params);
    let bytes = tokio::task::spawn_blocking(move || {
        store.cached(&stored.hash, endpoint, key, || {
            compute(&stored).map(|v| to_json(&v))
        })
    })
    .await
    .map_err(join_error)??;
    Ok(json_bytes(StatusCode::OK, bytes))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(upload).get(list))
        .route("/sessions/{id}", get(describe))
        .route("/sessions/{id}/layout", get(layout))
        .route("/sessions/{id}/query", post(query))
        .route(
            "/sessions/{id}/regions",
            get(get_regions).put(put_regions).post(put_regions),
        )
        .route("/sessions/{id}/confidence-region", post(confidence))
        .route("/sessions/{id}/cluster", post(cluster))
        .route("/sessions/{id}/heatmap", get(heatmap_grid))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state)
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SessionInfo {
    pub session_id: String,
    pub hash: String,
    pub summary: SessionSummary,
}

impl SessionInfo {
    fn of(stored: &StoredSession) -> Self {
        Self {
            session_id: stored.session.session_id.clone(),
            hash: stored.hash.clone(),
            summary: SessionSummary::of(&stored.session),
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct UploadParams {
    pub id: Option<String>,
}

async fn upload(
    State(state): State<AppState>,
    params: Result<Query<UploadParams>, QueryRejection>,
    body: Bytes,
) -> ApiResult<Response> {
    let Query(params) = params?;
    let store = state.store.clone();
    let (stored, created) =
        tokio::task::spawn_blocking(move || store.put_log(params.id.as_deref(), &body))
            .await
            .map_err(join_error)??;
    let status = if created {
        StatusCode::CREATED
    } else {
        StatusCode::OK
    };
    Ok((status, Json(SessionInfo::of(&stored))).into_response())
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SessionList {
    pub sessions: Vec<SessionInfo>,
}

async fn list(State(state): State<AppState>) -> Json<SessionList> {
    let sessions = state.store.list().iter().map(SessionInfo::of).collect();
    Json(SessionList { sessions })
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SessionDetail {
    pub session_id: String,
    pub hash: String,
    pub summary: SessionSummary,
    pub device: DeviceProfile,
    pub metadata: std::collections::BTreeMap<String, String>,
    pub report: ValidationReport,
    pub regions: Vec<SemanticRegion>,
}

async fn describe(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionDetail>> {
    let stored = state.store.get(&id)?;
    let s = &stored.session;
    Ok(Json(SessionDetail {
        session_id: s.session_id.clone(),
        hash: stored.hash.clone(),
        summary: SessionSummary::of(s),
        device: s.device,
        metadata: s.metadata.clone(),
        report: s.report.clone(),
        regions: stored.regions.as_ref().clone(),
    }))
}

/// Query parameters of `GET /sessions/{id}/layout`.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct LayoutParams {
    pub touch: Option<f64>,
    #[serde(rename = "move")]
    pub moving: Option<f64>,
    pub lift: Option<f64>,
    pub max_arc_height: Option<f64>,
    pub semantic_base: Option<f64>,
    pub semantic_step: Option<f64>,
    pub membership: Option<SemanticMembership>,
}

impl LayoutParams {
    pub fn config(&self, defaults: &ServiceConfig) -> LayoutConfig {
        let base = LayoutConfig {
            ring_radii: defaults.ring_radii,
            ..LayoutConfig::default()
        };
        LayoutConfig {
            ring_radii: RingRadii {
                touch: self.touch.unwrap_or(base.ring_radii.touch),
                moving: self.moving.unwrap_or(base.ring_radii.moving),
                lift: self.lift.unwrap_or(base.ring_radii.lift),
            },
            max_arc_height: self.max_arc_height.unwrap_or(base.max_arc_height),
            semantic_base: self.semantic_base.unwrap_or(base.semantic_base),
            semantic_step: self.semantic_step.unwrap_or(base.semantic_step),
            semantic_membership: self.membership.unwrap_or(base.semantic_membership),
        }
    }
}

async fn layout(
    State(state): State<AppState>,
    Path(id): Path<String>,
    params: Result<Query<LayoutParams>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(params) = params?;
    let stored = state.store.get(&id)?;
    let config = params.config(&state.config);
    // regions change the layout, so they are part of the key
    let key = (config, stored.regions_hash());
    cached(&state, &stored, "layout", &key, move |s| {
        build_layout_with_regions(&s.session, &s.regions, &config)
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QueryRequest {
    pub area: Area,
    #[serde(default)]
    pub mode: QueryMode,
}

async fn query(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<QueryRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let stored = state.store.get(&id)?;
    let (area, mode) = (req.area, req.mode);
    cached(&state, &stored, "query", &req, move |s| {
        Ok(spatial_query(&s.session, &area, mode))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct RegionsBody {
    pub regions: Vec<SemanticRegion>,
}

async fn get_regions(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<RegionsBody>> {
    let stored = state.store.get(&id)?;
    Ok(Json(RegionsBody {
        regions: stored.regions.as_ref().clone(),
    }))
}

async fn put_regions(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<RegionsBody>, JsonRejection>,
) -> ApiResult<Json<RegionsBody>> {
    let Json(body) = body?;
    let stored = state.store.put_regions(&id, body.regions)?;
    Ok(Json(RegionsBody {
        regions: stored.regions.as_ref().clone(),
    }))
}

fn default_filter() -> EventFilter {
    EventFilter::Down
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConfidenceRequest {
    pub center: Point,
    pub radius: f64,
    pub confidence: f64,
    /// Which events supply the points; finger-down by default.
    #[serde(default = "default_filter")]
    pub filter: EventFilter,
    /// Edge for the horizontal distance; nearest edge when omitted.
    #[serde(default)]
    pub side: Option<Side>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ConfidenceResponse {
    pub region: ConfidenceRegion,
    pub metrics: UiMetrics,
}

async fn confidence(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<ConfidenceRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let stored = state.store.get(&id)?;
    let (center, radius, c, filter, side) =
        (req.center, req.radius, req.confidence, req.filter, req.side);
    cached(&state, &stored, "confidence-region", &req, move |s| {
        let points = event_points(&s.session, filter);
        let region = confidence_region(&points, center, radius, c)?;
        let side = side.unwrap_or_else(|| Side::nearest(region.new_center, &s.session.device));
        let metrics = region_metrics(&region, &s.session.device, side)?;
        Ok(ConfidenceResponse { region, metrics })
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClusterRequest {
    pub k: usize,
    pub n_samples: Option<usize>,
    pub weight_euclid: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub min_length_px: f64,
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub center_cosine: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClusterResponse {
    /// Gestures that passed the length filter, in clustering order.
    pub gesture_ids: Vec<u32>,
    pub result: touchscope_core::ClusterResult,
}

/// The library call behind `POST /sessions/{id}/cluster`.
pub fn run_cluster(
    session: &touchscope_core::Session,
    req: &ClusterRequest,
    defaults: &ServiceConfig,
) -> touchscope_core::Result<ClusterResponse> {
    let n = req.n_samples.unwrap_or(defaults.default_samples);
    let mut distance = DistanceConfig::for_device(&session.device).with_samples(n);
    if let Some(w) = req.weight_euclid {
        distance = distance.with_weight(w);
    }
    distance.center_cosine = req.center_cosine;
    distance.validate()?;
    let config = KMeansConfig {
        max_iterations: req
            .max_iterations
            .unwrap_or(touchscope_core::clustering::DEFAULT_MAX_ITERATIONS),
        seed: req.seed,
        distance,
    };
    let vectors = session_vectors(session, n, req.min_length_px)?;
    let result = kmeans(&vectors, req.k, &config)?;
    Ok(ClusterResponse {
        gesture_ids: vectors.iter().map(|v| v.gesture_id).collect(),
        result,
    })
}

async fn cluster(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<ClusterRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let stored = state.store.get(&id)?;
    let defaults = state.config;
    let key = params_hash(&(&req, defaults.default_samples));
    cached(&state, &stored, "cluster", &key, move |s| {
        run_cluster(&s.session, &req, &defaults)
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HeatmapParams {
    pub cols: usize,
    pub rows: usize,
    #[serde(default)]
    pub filter: EventFilter,
}

async fn heatmap_grid(
    State(state): State<AppState>,
    Path(id): Path<String>,
    params: Result<Query<HeatmapParams>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(params) = params?;
    let stored = state.store.get(&id)?;
    let (cols, rows, filter) = (params.cols, params.rows, params.filter);
    cached(&state, &stored, "heatmap", &params, move |s| {
        heatmap(&s.session, cols, rows, filter)
    })
    .await
}
