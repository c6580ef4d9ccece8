//! HTTP API over a content-addressed working directory.
//!
//! Layout under the working directory:
//! `images/<sha256>` uploaded bytes, `maps/<sha256>-<kind>-<params digest>.png`
//! cached maps, `annotations/<sha256>/<name>/v<N>.json` annotation versions.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path as FsPath, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::{Bytes, Body};
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde_json::{json, Value};

use crate::canonical::{canonicalize, to_canonical_bytes};
use crate::filters::{ela_map, lga_map, noise_map, pca_basis, pca_map, ElaParams, FilterError, LgaParams, NoiseParams, PcaMode};
use crate::hash::{compute_hash, ContentHash};
use crate::map::{params_digest, AnalysisMap, MapKind};
use crate::metadata::summarize;
use crate::metrology::{run_metrology, AnnotationSet, MetrologyOptions};
use crate::raster::{load_image, RasterImage, SourceFormat};
use crate::report::{render_report, run_report, Clock, RenderFormat, ReportConfig, ReportError};

pub const CACHE_HEADER: &str = "x-printproof-cache";
pub const MAX_UPLOAD_BYTES: usize = 256 * 1024 * 1024;
pub const MAX_PIXEL_RADIUS: u32 = 32;
const DECODED_CACHE_SIZE: usize = 8;

#[derive(Clone, Debug)]
pub struct ServeConfig {
    pub addr: SocketAddr,
    pub dir: PathBuf,
    pub ui: Option<PathBuf>,
    pub timeout: Duration,
}

pub struct AppState {
    dir: PathBuf,
    timeout: Duration,
    decoded: Mutex<Vec<(ContentHash, Arc<RasterImage>)>>,
    key_locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
    computations: AtomicUsize,
}

impl AppState {
    pub fn new(dir: impl Into<PathBuf>, timeout: Duration) -> Arc<Self> {
        Arc::new(Self {
            dir: dir.into(),
            timeout,
            decoded: Mutex::new(Vec::new()),
            key_locks: Mutex::new(HashMap::new()),
            computations: AtomicUsize::new(0),
        })
    }

    /// Number of analysis maps computed (cache misses) since start.
    pub fn computations(&self) -> usize {
        self.computations.load(Ordering::SeqCst)
    }

    fn image_path(&self, id: &ContentHash) -> PathBuf {
        self.dir.join("images").join(id.to_hex())
    }

    fn lock_for(&self, key: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.key_locks.lock().expect("lock table poisoned");
        locks.entry(key.to_string()).or_default().clone()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self { status, body: json!({ "error": code, "message": message.into() }) }
    }

    fn field(field: &str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: json!({ "error": "INVALID_PARAM", "field": field, "message": message.into() }),
        }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string())
    }
}

impl From<FilterError> for ApiError {
    fn from(e: FilterError) -> Self {
        match e {
            FilterError::InvalidParam { field, reason } => Self::field(field, reason),
            FilterError::ImageTooSmall { .. } => Self::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string()),
            FilterError::EncodeFailure(_) => Self::internal(e),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status, &self.body)
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn json_response(status: StatusCode, v: &Value) -> Response {
    let body = to_canonical_bytes(v).expect("JSON values serialize");
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn parse_id(id: &str) -> ApiResult<ContentHash> {
    ContentHash::parse(id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_IMAGE", format!("no image {id}")))
}

async fn read_image_bytes(state: &AppState, id: &ContentHash) -> ApiResult<Vec<u8>> {
    tokio::fs::read(state.image_path(id))
        .await
        .map_err(|_| ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_IMAGE", format!("no image {id}")))
}

async fn with_timeout<T: Send + 'static>(
    state: &AppState,
    f: impl FnOnce() -> T + Send + 'static,
) -> ApiResult<T> {
    match tokio::time::timeout(state.timeout, tokio::task::spawn_blocking(f)).await {
        Ok(Ok(v)) => Ok(v),
        Ok(Err(e)) => Err(ApiError::internal(e)),
        Err(_) => Err(ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "TIMEOUT", "computation exceeded the request timeout")),
    }
}

async fn decoded(state: &Arc<AppState>, id: &ContentHash) -> ApiResult<Arc<RasterImage>> {
    if let Some((_, img)) = state.decoded.lock().expect("poisoned").iter().find(|(h, _)| h == id) {
        return Ok(img.clone());
    }
    let bytes = read_image_bytes(state, id).await?;
    let img = with_timeout(state, move || load_image(&bytes)).await?.map_err(|e| ApiError::internal(e))?;
    let img = Arc::new(img);
    let mut cache = state.decoded.lock().expect("poisoned");
    if cache.len() >= DECODED_CACHE_SIZE {
        cache.remove(0);
    }
    cache.push((id.clone(), img.clone()));
    Ok(img)
}

fn write_atomic(path: &FsPath, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

async fn upload(State(state): State<Arc<AppState>>, mut multipart: Multipart) -> ApiResult<Response> {
    let mut data: Option<Bytes> = None;
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_MULTIPART", e.to_string()))?
    {
        let is_file = field.name() == Some("file") || field.file_name().is_some();
        let bytes = field.bytes().await.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_MULTIPART", e.to_string()))?;
        if is_file || data.is_none() {
            data = Some(bytes);
            if is_file {
                break;
            }
        }
    }
    let bytes = data.ok_or_else(|| ApiError::field("file", "multipart body has no file part"))?;
    let b = bytes.to_vec();
    let img = with_timeout(&state, move || load_image(&b).map(|i| (i.width(), i.height(), i.source_format())))
        .await?
        .map_err(|e| ApiError::new(StatusCode::UNSUPPORTED_MEDIA_TYPE, e.code(), e.to_string()))?;
    let id = compute_hash(&bytes);
    let path = state.image_path(&id);
    if !path.exists() {
        write_atomic(&path, &bytes).map_err(ApiError::internal)?;
    }
    Ok(json_response(
        StatusCode::OK,
        &json!({ "image_id": id, "width": img.0, "height": img.1, "format": img.2 }),
    ))
}

/// Metadata JSON; non-JPEG input gets the file and size fields only.
pub fn meta_json(bytes: &[u8], img: &RasterImage) -> Value {
    match img.source_format() {
        SourceFormat::Jpeg => match summarize(bytes) {
            Ok(s) => s.to_json(),
            Err(e) => json!({ "error": e.code() }),
        },
        SourceFormat::Png => json!({
            "file": { "size": bytes.len(), "hash": img.source_hash(), "mime": "image/png" },
            "image_size": format!("{}x{}", img.width(), img.height()),
            "megapixels": crate::metadata::summary::megapixels(img.width(), img.height()),
        }),
    }
}

async fn meta(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let bytes = read_image_bytes(&state, &id).await?;
    let img = decoded(&state, &id).await?;
    Ok(json_response(StatusCode::OK, &meta_json(&bytes, &img)))
}

/// A validated analysis request.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalysisRequest {
    Ela(ElaParams),
    Pca { component: u8, mode: PcaMode },
    Lga(LgaParams),
    Noise(NoiseParams),
}

fn take<T: std::str::FromStr>(q: &mut BTreeMap<String, String>, key: &str, default: T) -> ApiResult<T> {
    match q.remove(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| ApiError::field(key, format!("cannot parse {v:?}"))),
    }
}

impl AnalysisRequest {
    pub fn parse(kind: &str, mut q: BTreeMap<String, String>) -> ApiResult<Self> {
        let req = match kind {
            "ela" => {
                let d = ElaParams::default();
                Self::Ela(ElaParams {
                    quality: take(&mut q, "quality", d.quality)?,
                    scale: take(&mut q, "scale", d.scale)?,
                    contrast: take(&mut q, "contrast", d.contrast)?,
                })
            }
            "pca" => Self::Pca {
                component: take(&mut q, "component", 1u8)?,
                mode: match q.remove("mode") {
                    None => PcaMode::Projection,
                    Some(m) => m.parse().map_err(|e: String| ApiError::field("mode", e))?,
                },
            },
            "lga" => {
                let d = LgaParams::default();
                Self::Lga(LgaParams {
                    intensity: take(&mut q, "intensity", d.intensity)?,
                    channel: match q.remove("channel") {
                        None => d.channel,
                        Some(c) => c.parse().map_err(|e: String| ApiError::field("channel", e))?,
                    },
                    normalized: take(&mut q, "normalized", d.normalized)?,
                })
            }
            "noise" => {
                let d = NoiseParams::default();
                Self::Noise(NoiseParams { radius: take(&mut q, "radius", d.radius)?, gain: take(&mut q, "gain", d.gain)? })
            }
            other => {
                return Err(ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_ANALYSIS", format!("no analysis {other:?}")))
            }
        };
        if let Some(k) = q.keys().next() {
            return Err(ApiError::field(k, "unknown parameter"));
        }
        req.validate()?;
        Ok(req)
    }

    fn validate(&self) -> Result<(), FilterError> {
        match self {
            Self::Ela(p) => p.validate(),
            Self::Pca { component, .. } => crate::filters::check_range("component", *component as i64, 1, 3),
            Self::Lga(p) => p.validate(),
            Self::Noise(p) => p.validate(),
        }
    }

    pub fn kind(&self) -> MapKind {
        match self {
            Self::Ela(_) => MapKind::Ela,
            Self::Pca { mode: PcaMode::Projection, .. } => MapKind::PcaProjection,
            Self::Pca { mode: PcaMode::Distance, .. } => MapKind::PcaDistance,
            Self::Lga(_) => MapKind::Lga,
            Self::Noise(_) => MapKind::Noise,
        }
    }

    /// Same canonical params the computed map will carry.
    pub fn params(&self) -> Value {
        canonicalize(match self {
            Self::Ela(p) => p.to_json(),
            Self::Pca { component, mode } => json!({ "component": component, "mode": mode.as_str() }),
            Self::Lga(p) => p.to_json(),
            Self::Noise(p) => p.to_json(),
        })
    }

    pub fn compute(&self, img: &RasterImage) -> Result<AnalysisMap, FilterError> {
        match self {
            Self::Ela(p) => ela_map(img, p),
            Self::Pca { component, mode } => pca_map(img, &pca_basis(img), *component, *mode),
            Self::Lga(p) => lga_map(img, p),
            Self::Noise(p) => noise_map(img, p),
        }
    }
}

async fn analysis(
    State(state): State<Arc<AppState>>,
    Path((id, kind)): Path<(String, String)>,
    Query(q): Query<BTreeMap<String, String>>,
) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    if !state.image_path(&id).exists() {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_IMAGE", format!("no image {id}")));
    }
    let req = AnalysisRequest::parse(&kind, q)?;
    let digest = params_digest(req.kind(), &req.params());
    let key = format!("{}-{}-{}", id.to_hex(), req.kind().as_str(), digest.to_hex());
    let path = state.dir.join("maps").join(format!("{key}.png"));

    let lock = state.lock_for(&key);
    let _guard = lock.lock().await;
    let (png, status) = match tokio::fs::read(&path).await {
        Ok(png) => (png, "hit"),
        Err(_) => {
            let img = decoded(&state, &id).await?;
            let st = state.clone();
            let png = with_timeout(&state, move || -> Result<Vec<u8>, ApiError> {
                let map = req.compute(&img)?;
                st.computations.fetch_add(1, Ordering::SeqCst);
                let png = map.to_png();
                write_atomic(&path, &png).map_err(ApiError::internal)?;
                Ok(png)
            })
            .await??;
            (png, "miss")
        }
    };
    Ok((
        StatusCode::OK,
        [(header::CONTENT_TYPE, HeaderValue::from_static("image/png")), (CACHE_HEADER.parse().unwrap(), HeaderValue::from_static(status))],
        png,
    )
        .into_response())
}

fn check_name(name: &str) -> ApiResult<()> {
    let ok = !name.is_empty()
        && name.len() <= 64
        && !name.starts_with('.')
        && name.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'));
    if ok {
        Ok(())
    } else {
        Err(ApiError::field("name", "annotation names are 1-64 characters of [A-Za-z0-9._-]"))
    }
}

fn ann_dir(state: &AppState, id: &ContentHash, name: &str) -> PathBuf {
    state.dir.join("annotations").join(id.to_hex()).join(name)
}

fn latest_version(dir: &FsPath) -> Option<(u32, PathBuf)> {
    std::fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let n = e.file_name().to_str()?.strip_prefix('v')?.strip_suffix(".json")?.parse::<u32>().ok()?;
            Some((n, e.path()))
        })
        .max_by_key(|(n, _)| *n)
}

async fn put_annotations(
    State(state): State<Arc<AppState>>,
    Path((id, name)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    check_name(&name)?;
    let img = decoded(&state, &id).await?;
    let ann = AnnotationSet::from_json(&body).map_err(|e| ApiError::field("body", e.to_string()))?;
    if ann.image_hash != id {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "HASH_MISMATCH",
            format!("annotations reference image {}, not {id}", ann.image_hash),
        ));
    }
    let violations = ann.validate(Some((img.width(), img.height())));
    if let Some(first) = violations.first() {
        return Err(ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: json!({ "error": "INVALID_ANNOTATIONS", "field": first.field, "message": first.message, "violations": violations }),
        });
    }
    let dir = ann_dir(&state, &id, &name);
    let lock = state.lock_for(&format!("annotations/{}", id.to_hex()));
    let _guard = lock.lock().await;
    let version = latest_version(&dir).map_or(1, |(n, _)| n + 1);
    write_atomic(&dir.join(format!("v{version}.json")), &body).map_err(ApiError::internal)?;
    Ok(json_response(
        StatusCode::OK,
        &json!({ "name": name, "version": version, "hash": compute_hash(&body) }),
    ))
}

async fn load_annotations(state: &AppState, id: &ContentHash, name: &str) -> ApiResult<Vec<u8>> {
    check_name(name)?;
    let (_, path) = latest_version(&ann_dir(state, id, name))
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_ANNOTATIONS", format!("no annotation set {name:?}")))?;
    tokio::fs::read(path).await.map_err(ApiError::internal)
}

async fn get_annotations(State(state): State<Arc<AppState>>, Path((id, name)): Path<(String, String)>) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let bytes = load_annotations(&state, &id, &name).await?;
    Ok((StatusCode::OK, [(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

async fn list_annotations(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    if !state.image_path(&id).exists() {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_IMAGE", format!("no image {id}")));
    }
    let mut names = Vec::new();
    if let Ok(rd) = std::fs::read_dir(state.dir.join("annotations").join(id.to_hex())) {
        for e in rd.flatten() {
            if let (Some(n), Some((v, _))) = (e.file_name().to_str().map(str::to_string), latest_version(&e.path())) {
                names.push(json!({ "name": n, "version": v }));
            }
        }
    }
    names.sort_by(|a, b| a["name"].as_str().cmp(&b["name"].as_str()));
    Ok(json_response(StatusCode::OK, &json!({ "annotations": names })))
}

fn geo_options(q: &mut BTreeMap<String, String>) -> ApiResult<MetrologyOptions> {
    let d = MetrologyOptions::default();
    let opts = MetrologyOptions {
        seed: take(q, "seed", d.seed)?,
        perturbation_px: take(q, "perturbation", d.perturbation_px)?,
        tilt_tau: take(q, "tilt_tau", d.tilt_tau)?,
    };
    if !(opts.perturbation_px >= 0.0 && opts.perturbation_px.is_finite()) {
        return Err(ApiError::field("perturbation", "must be a finite number >= 0"));
    }
    if !(opts.tilt_tau > 0.0 && opts.tilt_tau < 1.0) {
        return Err(ApiError::field("tilt_tau", "must lie in (0, 1)"));
    }
    Ok(opts)
}

async fn metrology(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(mut q): Query<BTreeMap<String, String>>,
) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let name = q.remove("annotations").ok_or_else(|| ApiError::field("annotations", "required"))?;
    let opts = geo_options(&mut q)?;
    if let Some(k) = q.keys().next() {
        return Err(ApiError::field(k, "unknown parameter"));
    }
    let img = decoded(&state, &id).await?;
    let bytes = load_annotations(&state, &id, &name).await?;
    let ann = AnnotationSet::from_json(&bytes).map_err(ApiError::internal)?;
    let result = with_timeout(&state, move || run_metrology(&ann, (img.width(), img.height()), &opts)).await?;
    match result {
        Ok(r) => Ok(json_response(StatusCode::OK, &r.to_json())),
        Err(v) => Err(ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: json!({ "error": "INVALID_ANNOTATIONS", "field": v[0].field, "message": v[0].message, "violations": v }),
        }),
    }
}

async fn report(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(mut q): Query<BTreeMap<String, String>>,
) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let name = q.remove("annotations");
    let fixed = q.remove("fixed_time");
    let opts = geo_options(&mut q)?;
    if let Some(k) = q.keys().next() {
        return Err(ApiError::field(k, "unknown parameter"));
    }
    let bytes = read_image_bytes(&state, &id).await?;
    let ann = match &name {
        Some(n) => Some(load_annotations(&state, &id, n).await?),
        None => None,
    };
    let cfg = ReportConfig {
        metrology: opts,
        clock: fixed.map_or(Clock::System, Clock::Fixed),
        ..Default::default()
    };
    let bundle = with_timeout(&state, move || run_report(&bytes, ann.as_deref(), &cfg)).await?.map_err(|e| match e {
        ReportError::InvalidAnnotations(v) => ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: json!({ "error": "INVALID_ANNOTATIONS", "field": v[0].field, "message": v[0].message, "violations": v }),
        },
        other => ApiError::internal(other),
    })?;
    Ok((
        StatusCode::OK,
        [(header::CONTENT_TYPE, "application/json")],
        render_report(&bundle.report, RenderFormat::Json),
    )
        .into_response())
}

async fn pixels(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(mut q): Query<BTreeMap<String, String>>,
) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let x: u32 = q.remove("x").ok_or_else(|| ApiError::field("x", "required"))?.parse().map_err(|_| ApiError::field("x", "not a pixel index"))?;
    let y: u32 = q.remove("y").ok_or_else(|| ApiError::field("y", "required"))?.parse().map_err(|_| ApiError::field("y", "not a pixel index"))?;
    let r: u32 = take(&mut q, "r", 0)?;
    if let Some(k) = q.keys().next() {
        return Err(ApiError::field(k, "unknown parameter"));
    }
    if r > MAX_PIXEL_RADIUS {
        return Err(ApiError::field("r", format!("at most {MAX_PIXEL_RADIUS}")));
    }
    let img = decoded(&state, &id).await?;
    if x >= img.width() {
        return Err(ApiError::field("x", format!("outside 0..{}", img.width())));
    }
    if y >= img.height() {
        return Err(ApiError::field("y", format!("outside 0..{}", img.height())));
    }
    let (x0, y0) = (x.saturating_sub(r), y.saturating_sub(r));
    let (x1, y1) = ((x + r).min(img.width() - 1), (y + r).min(img.height() - 1));
    let rows: Vec<Vec<[u8; 3]>> = (y0..=y1).map(|yy| (x0..=x1).map(|xx| img.pixel(xx, yy)).collect()).collect();
    Ok(json_response(
        StatusCode::OK,
        &json!({ "x": x, "y": y, "r": r, "x0": x0, "y0": y0, "width": x1 - x0 + 1, "height": y1 - y0 + 1, "pixels": rows }),
    ))
}

const PLACEHOLDER: &str = "<!DOCTYPE html><html><head><meta charset=\"utf-8\"><title>printproof</title></head>\
<body><h1>printproof</h1><p>The API is served under <code>/api</code>. Start the server with <code>--ui &lt;dir&gt;</code> to serve the examiner UI here.</p></body></html>\n";

/// The full application. `ui` is a static bundle directory served at `/`.
pub fn app(state: Arc<AppState>, ui: Option<&FsPath>) -> Router {
    let api = Router::new()
        .route("/api/images", post(upload))
        .route("/api/images/{id}/meta", get(meta))
        .route("/api/images/{id}/analysis/{kind}", get(analysis))
        .route("/api/images/{id}/annotations", get(list_annotations))
        .route("/api/images/{id}/annotations/{name}", get(get_annotations).put(put_annotations))
        .route("/api/images/{id}/metrology", get(metrology))
        .route("/api/images/{id}/report", get(report))
        .route("/api/images/{id}/pixels", get(pixels))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state);
    match ui {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api.route(
            "/",
            get(|| async { ([(header::CONTENT_TYPE, "text/html; charset=utf-8")], Body::from(PLACEHOLDER)) }),
        ),
    }
}

pub async fn serve(cfg: ServeConfig) -> std::io::Result<()> {
    std::fs::create_dir_all(&cfg.dir)?;
    let state = AppState::new(cfg.dir.clone(), cfg.timeout);
    let listener = tokio::net::TcpListener::bind(cfg.addr).await?;
    axum::serve(listener, app(state, cfg.ui.as_deref())).await
}
