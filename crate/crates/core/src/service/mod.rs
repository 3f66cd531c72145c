//! HTTP API over sessions of clue-answer pairs and layouts.
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/sessions` | new session |
//! | GET | `/sessions/{id}` | whole session |
//! | POST | `/sessions/{id}/pipeline/text` | `{text, prompt_lang}`, run the text route |
//! | POST | `/sessions/{id}/pipeline/keywords` | `{answers, classifier?}`, run the answer route |
//! | GET | `/sessions/{id}/pairs?status=` | list pairs |
//! | PATCH | `/sessions/{id}/pairs/{pid}` | `{status}`, review decision |
//! | POST | `/sessions/{id}/layouts` | `{config, preferred?, jobs?}`, lay out accepted pairs |
//! | GET | `/sessions/{id}/layouts/{lid}?format=json\|svg\|text&reveal=` | fetch a layout |
//!
//! Errors are `{"error": {"code": ..., "message": ...}}`.

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::arabic::normalize;
use crate::dataset::{ClueAnswerPair, PairStatus};
use crate::gateway::CompletionGateway;
use crate::pipeline::{
    run_path_a, run_path_b, ClassifierKind, PipelineConfig, PipelineError, PromptLang,
    ReportSummary,
};
use crate::render::{number_clues, render, PuzzleJson, RenderFormat};
use crate::schema::{generate_parallel, CrosswordLayout, GeneratorConfig, SchemaError};

mod store;

pub use store::{Session, SessionHandle, Store, StoredLayout};

pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub port: u16,
    pub host: String,
    pub data_dir: PathBuf,
    /// Allowed browser origin; `None` allows any.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            port: DEFAULT_PORT,
            host: "127.0.0.1".into(),
            data_dir: PathBuf::from("cwgen-data"),
            cors_origin: None,
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub gateway: Option<Arc<dyn CompletionGateway>>,
    pub pipeline: PipelineConfig,
}

impl AppState {
    pub fn new(store: Store, gateway: Option<Arc<dyn CompletionGateway>>) -> Self {
        AppState {
            store: Arc::new(store),
            gateway,
            pipeline: PipelineConfig::default(),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("unknown {what} {id}"),
        )
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unprocessable", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(json!({"error": {"code": self.code, "message": self.message}})),
        )
            .into_response()
    }
}

impl From<std::io::Error> for ApiError {
    fn from(err: std::io::Error) -> Self {
        ApiError::internal(format!("storage: {err}"))
    }
}

impl From<PipelineError> for ApiError {
    fn from(err: PipelineError) -> Self {
        match err {
            PipelineError::EmptyDocument
            | PipelineError::EmptyInput
            | PipelineError::AnswerTooLong { .. } => ApiError::unprocessable(err.to_string()),
            PipelineError::Gateway(_) | PipelineError::ParagraphGateway { .. } => {
                ApiError::new(StatusCode::BAD_GATEWAY, "gateway", err.to_string())
            }
            other => ApiError::internal(other.to_string()),
        }
    }
}

impl From<SchemaError> for ApiError {
    fn from(err: SchemaError) -> Self {
        match err {
            SchemaError::InconsistentState(_) => ApiError::internal(err.to_string()),
            other => ApiError::unprocessable(other.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

fn session(state: &AppState, id: &str) -> ApiResult<SessionHandle> {
    state
        .store
        .get(id)
        .ok_or_else(|| ApiError::not_found("session", id))
}

fn gateway(state: &AppState) -> ApiResult<Arc<dyn CompletionGateway>> {
    state.gateway.clone().ok_or_else(|| {
        ApiError::new(
            StatusCode::CONFLICT,
            "no_gateway",
            "no model gateway configured (set CWGEN_API_KEY or load a transcript)",
        )
    })
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))
}

pub fn router(state: AppState, cors_origin: Option<&str>) -> Router {
    let origin = match cors_origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST, Method::PATCH])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/pipeline/text", post(pipeline_text))
        .route("/sessions/{id}/pipeline/keywords", post(pipeline_keywords))
        .route("/sessions/{id}/pairs", get(list_pairs))
        .route("/sessions/{id}/pairs/{pid}", patch(review_pair))
        .route("/sessions/{id}/layouts", post(create_layout))
        .route("/sessions/{id}/layouts/{lid}", get(get_layout))
        .layer(cors)
        .with_state(state)
}

/// Binds and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig, state: AppState) -> std::io::Result<()> {
    let addr: SocketAddr = format!("{}:{}", config.host, config.port)
        .parse()
        .map_err(|e| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("bad address: {e}"),
            )
        })?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let app = router(state, config.cors_origin.as_deref());
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn create_session(
    State(state): State<AppState>,
) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    let session = state.store.create()?;
    Ok((StatusCode::CREATED, Json(json!({"id": session.id}))))
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<Session>> {
    let handle = session(&state, &id)?;
    let guard = handle.read().await;
    Ok(Json(guard.clone()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TextRequest {
    text: String,
    #[serde(default)]
    prompt_lang: PromptLang,
}

#[derive(Serialize)]
struct PipelineResponse {
    added: Vec<ClueAnswerPair>,
    report: ReportSummary,
}

async fn pipeline_text(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<PipelineResponse>> {
    let handle = session(&state, &id)?;
    let req: TextRequest = parse_body(&body)?;
    let gw = gateway(&state)?;
    let config = state.pipeline.clone();
    let report =
        blocking(move || run_path_a(&req.text, req.prompt_lang, gw.as_ref(), &config)).await??;
    append(&state, &handle, report.passed.clone(), report.summary()).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KeywordRequest {
    answers: Vec<String>,
    #[serde(default)]
    classifier: ClassifierKind,
}

async fn pipeline_keywords(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<PipelineResponse>> {
    let handle = session(&state, &id)?;
    let req: KeywordRequest = parse_body(&body)?;
    let gw = gateway(&state)?;
    let config = state.pipeline.clone();
    let answers: Vec<_> = req
        .answers
        .iter()
        .map(|a| normalize(a))
        .filter(|a| !a.is_empty())
        .collect();
    let report =
        blocking(move || run_path_b(&answers, req.classifier, gw.as_ref(), &config)).await??;
    append(&state, &handle, report.passed.clone(), report.summary()).await
}

async fn append(
    state: &AppState,
    handle: &SessionHandle,
    pairs: Vec<ClueAnswerPair>,
    report: ReportSummary,
) -> ApiResult<Json<PipelineResponse>> {
    let mut guard = handle.write().await;
    let added = guard.add_pairs(pairs);
    guard.touch();
    state.store.persist(&guard)?;
    Ok(Json(PipelineResponse { added, report }))
}

#[derive(Deserialize)]
struct PairQuery {
    status: Option<String>,
}

async fn list_pairs(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<PairQuery>,
) -> ApiResult<Json<Vec<ClueAnswerPair>>> {
    let handle = session(&state, &id)?;
    let status = match query.status.as_deref() {
        None | Some("") => None,
        Some(s) => Some(s.parse::<PairStatus>().map_err(ApiError::bad_request)?),
    };
    let guard = handle.read().await;
    Ok(Json(
        guard
            .pairs
            .iter()
            .filter(|p| status.is_none_or(|s| p.status == s))
            .cloned()
            .collect(),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReviewRequest {
    status: String,
}

async fn review_pair(
    State(state): State<AppState>,
    Path((id, pid)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Json<ClueAnswerPair>> {
    let handle = session(&state, &id)?;
    let req: ReviewRequest = parse_body(&body)?;
    let next: PairStatus = req.status.parse().map_err(ApiError::bad_request)?;
    let mut guard = handle.write().await;
    let pair = guard
        .pairs
        .iter_mut()
        .find(|p| p.id == pid)
        .ok_or_else(|| ApiError::not_found("pair", &pid))?;
    if pair.status == next {
        return Ok(Json(pair.clone()));
    }
    if !pair.status.can_become(next) {
        return Err(ApiError::unprocessable(format!(
            "cannot move pair {pid} from {} to {}",
            pair.status.as_str(),
            next.as_str()
        )));
    }
    pair.status = next;
    let out = pair.clone();
    guard.touch();
    state.store.persist(&guard)?;
    Ok(Json(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutRequest {
    config: GeneratorConfig,
    #[serde(default)]
    preferred: Vec<String>,
    #[serde(default = "one")]
    jobs: usize,
}

fn one() -> usize {
    1
}

#[derive(Serialize)]
struct LayoutResponse {
    id: String,
    layout: CrosswordLayout,
    puzzle: PuzzleJson,
}

fn layout_response(stored: &StoredLayout, pairs: &[ClueAnswerPair]) -> ApiResult<LayoutResponse> {
    let numbering = number_clues(&stored.layout).map_err(|e| ApiError::internal(e.to_string()))?;
    let puzzle = crate::render::export_puzzle_json(&stored.layout, pairs, &numbering)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(LayoutResponse {
        id: stored.id.clone(),
        layout: stored.layout.clone(),
        puzzle,
    })
}

async fn create_layout(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<LayoutResponse>)> {
    let handle = session(&state, &id)?;
    let req: LayoutRequest = parse_body(&body)?;
    req.config.validate().map_err(ApiError::from)?;
    if req.jobs == 0 {
        return Err(ApiError::unprocessable("jobs must be at least 1"));
    }
    let accepted: Vec<ClueAnswerPair> = {
        let guard = handle.read().await;
        guard
            .pairs
            .iter()
            .filter(|p| p.status == PairStatus::Accepted)
            .cloned()
            .collect()
    };
    if accepted.len() < req.config.min_answers {
        return Err(ApiError::unprocessable(format!(
            "{} accepted pairs, config needs at least {}",
            accepted.len(),
            req.config.min_answers
        )));
    }
    let preferred: BTreeSet<String> = req.preferred.iter().cloned().collect();
    let config = req.config.clone();
    let jobs = req.jobs;
    let layout =
        blocking(move || generate_parallel(&config, &accepted, &preferred, jobs)).await??;

    let mut guard = handle.write().await;
    let stored = StoredLayout {
        id: format!("l{}", guard.layouts.len()),
        config: req.config,
        preferred: req.preferred,
        layout,
    };
    let response = layout_response(&stored, &guard.pairs)?;
    guard.layouts.push(stored);
    guard.touch();
    state.store.persist(&guard)?;
    Ok((StatusCode::CREATED, Json(response)))
}

#[derive(Deserialize)]
struct LayoutQuery {
    format: Option<String>,
    #[serde(default)]
    reveal: bool,
}

async fn get_layout(
    State(state): State<AppState>,
    Path((id, lid)): Path<(String, String)>,
    Query(query): Query<LayoutQuery>,
) -> ApiResult<Response> {
    let handle = session(&state, &id)?;
    let format: RenderFormat = query
        .format
        .as_deref()
        .unwrap_or("json")
        .parse()
        .map_err(ApiError::bad_request)?;
    let guard = handle.read().await;
    let stored = guard
        .layouts
        .iter()
        .find(|l| l.id == lid)
        .ok_or_else(|| ApiError::not_found("layout", &lid))?;
    let response = match format {
        RenderFormat::Json => Json(layout_response(stored, &guard.pairs)?).into_response(),
        RenderFormat::Svg | RenderFormat::Text => {
            let body = render(&stored.layout, &guard.pairs, format, query.reveal)
                .map_err(|e| ApiError::internal(e.to_string()))?;
            let mime = if format == RenderFormat::Svg {
                "image/svg+xml; charset=utf-8"
            } else {
                "text/plain; charset=utf-8"
            };
            ([(header::CONTENT_TYPE, mime)], body).into_response()
        }
    };
    Ok(response)
}
