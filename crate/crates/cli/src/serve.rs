use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine as _;
use clap::Args;
use serde::{Deserialize, Serialize};

use c2l::interaction::Engine;
use c2l::predictor::wire::{handle_request, WireRequest};
use c2l::predictor::{PredictError, Predictor};
use c2l::session::{SessionError, SessionState, SessionStore};
use c2l::{rle, Annotation, Image, LabelMask};

use crate::{parse_predictor, PolicyArgs, PredictorSpec};

#[derive(Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Bind address.
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Directory of static files for the web UI.
    #[arg(long)]
    assets: Option<PathBuf>,
    #[arg(long, default_value = "geodesic", value_parser = parse_predictor)]
    predictor: PredictorSpec,
    #[command(flatten)]
    policy: PolicyArgs,
}

pub struct AppState {
    pub store: SessionStore,
    pub predictor: Arc<dyn Predictor>,
    pub assets: Option<PathBuf>,
}

pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::UnknownSession(_) => StatusCode::NOT_FOUND,
            SessionError::InvalidAnnotation(_) | SessionError::Core(_) => StatusCode::BAD_REQUEST,
            SessionError::NoGroundTruth | SessionError::NothingToUndo => StatusCode::CONFLICT,
            SessionError::Predictor(p) => predict_status(p),
        };
        ApiError(status, e.to_string())
    }
}

fn predict_status(e: &PredictError) -> StatusCode {
    match e {
        PredictError::InvalidRequest(_) => StatusCode::BAD_REQUEST,
        _ => StatusCode::BAD_GATEWAY,
    }
}

fn bad_request(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, msg.into())
}

#[derive(Deserialize)]
pub struct CreateRequest {
    /// Base64 image file (PNG, JPEG or BMP).
    pub image_b64: String,
    /// Optional base64 PNG ground-truth mask.
    #[serde(default)]
    pub gt_b64: Option<String>,
}

#[derive(Serialize)]
pub struct CreateResponse {
    pub id: String,
    pub width: usize,
    pub height: usize,
}

#[derive(Serialize)]
pub struct MaskResponse {
    pub width: usize,
    pub height: usize,
    pub mask_rle: Vec<u32>,
    pub annotations: usize,
    pub cumulative_cost: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iou: Option<f64>,
}

impl From<SessionState> for MaskResponse {
    fn from(s: SessionState) -> Self {
        Self {
            width: s.mask.width(),
            height: s.mask.height(),
            mask_rle: rle::encode(&s.mask),
            annotations: s.annotations,
            cumulative_cost: s.cumulative_cost,
            iou: s.iou,
        }
    }
}

fn decode_b64(s: &str, what: &str) -> Result<Vec<u8>, ApiError> {
    base64::engine::general_purpose::STANDARD
        .decode(s.trim())
        .map_err(|e| bad_request(format!("{what}: bad base64: {e}")))
}

/// Runs blocking store work off the async executor.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

async fn create(
    State(app): State<Arc<AppState>>,
    Json(req): Json<CreateRequest>,
) -> Result<Json<CreateResponse>, ApiError> {
    let bytes = decode_b64(&req.image_b64, "image")?;
    let gt_bytes = req.gt_b64.as_deref().map(|g| decode_b64(g, "gt")).transpose()?;
    blocking(move || {
        let image = Image::from_png_bytes(&bytes).map_err(|e| bad_request(e.to_string()))?;
        let gt = match gt_bytes {
            Some(b) => Some(LabelMask::from_png_bytes(&b).map_err(|e| bad_request(e.to_string()))?),
            None => None,
        };
        let (width, height) = image.dims();
        let id = app.store.create(image, gt)?;
        log::info!("created session {id} ({width}x{height})");
        Ok(Json(CreateResponse { id, width, height }))
    })
    .await
}

async fn annotate(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Json(ann): Json<Annotation>,
) -> Result<Json<MaskResponse>, ApiError> {
    blocking(move || Ok(Json(app.store.annotate(&id, ann)?.into()))).await
}

async fn undo(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<MaskResponse>, ApiError> {
    blocking(move || Ok(Json(app.store.undo(&id)?.into()))).await
}

async fn mask(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<MaskResponse>, ApiError> {
    blocking(move || Ok(Json(app.store.state(&id)?.into()))).await
}

async fn delete(State(app): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> StatusCode {
    if app.store.remove(&id) {
        StatusCode::NO_CONTENT
    } else {
        StatusCode::NOT_FOUND
    }
}

async fn suggest(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Response, ApiError> {
    blocking(move || Ok(Json(app.store.suggest(&id)?).into_response())).await
}

async fn predict(
    State(app): State<Arc<AppState>>,
    Json(req): Json<WireRequest>,
) -> Result<Response, ApiError> {
    blocking(move || match handle_request(&req, app.predictor.as_ref()) {
        Ok(resp) => Ok(Json(resp).into_response()),
        Err(e) => Err(ApiError(predict_status(&e), e.to_string())),
    })
    .await
}

async fn healthz() -> &'static str {
    "ok"
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js") | Some("mjs") => "text/javascript; charset=utf-8",
        Some("css") => "text/css; charset=utf-8",
        Some("json") | Some("map") => "application/json",
        Some("png") => "image/png",
        Some("jpg") | Some("jpeg") => "image/jpeg",
        Some("svg") => "image/svg+xml",
        Some("wasm") => "application/wasm",
        Some("ico") => "image/x-icon",
        _ => "application/octet-stream",
    }
}

/// Resolves a request path inside `root`, refusing anything but plain
/// components.
pub fn asset_path(root: &Path, uri_path: &str) -> Option<PathBuf> {
    let rel = uri_path.trim_start_matches('/');
    let rel = if rel.is_empty() { "index.html" } else { rel };
    let rel = Path::new(rel);
    if !rel.components().all(|c| matches!(c, Component::Normal(_))) {
        return None;
    }
    Some(root.join(rel))
}

async fn static_file(State(app): State<Arc<AppState>>, uri: Uri) -> Response {
    let Some(root) = &app.assets else {
        return StatusCode::NOT_FOUND.into_response();
    };
    let Some(path) = asset_path(root, uri.path()) else {
        return StatusCode::NOT_FOUND.into_response();
    };
    match tokio::fs::read(&path).await {
        Ok(body) => ([(header::CONTENT_TYPE, content_type(&path))], Bytes::from(body)).into_response(),
        Err(_) => StatusCode::NOT_FOUND.into_response(),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", axum::routing::delete(delete))
        .route("/sessions/{id}/annotations", post(annotate))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/mask", get(mask))
        .route("/sessions/{id}/suggest", get(suggest))
        .route("/predict", post(predict))
        .route("/healthz", get(healthz))
        .fallback(get(static_file))
        .with_state(state)
}

pub fn app_state(
    predictor: Arc<dyn Predictor>,
    policy: c2l::interaction::Policy,
    assets: Option<PathBuf>,
) -> anyhow::Result<Arc<AppState>> {
    let engine = Engine::<f64>::new(policy)?;
    Ok(Arc::new(AppState {
        store: SessionStore::new(predictor.clone(), engine),
        predictor,
        assets,
    }))
}

pub fn run(args: ServeArgs) -> anyhow::Result<()> {
    if let Some(a) = &args.assets {
        if !a.is_dir() {
            anyhow::bail!("assets directory {} not found", a.display());
        }
    }
    let state = app_state(args.predictor.build(), args.policy.policy(), args.assets.clone())?;
    let addr: SocketAddr = format!("{}:{}", args.host, args.port).parse()?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        log::info!("listening on http://{}", listener.local_addr()?);
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(state)).await?;
        Ok(())
    })
}
