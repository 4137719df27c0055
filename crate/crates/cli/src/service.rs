//! Local HTTP API for the authoring UI.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use emordle_core::engine::{Engine, EngineError};
use emordle_core::fonts::FontError;
use emordle_core::ingest::{parse_named, WordList};
use emordle_core::layout::{export_layout, LayoutError, MAX_CANVAS, MIN_CANVAS};
use emordle_core::render::{RenderError, PALETTES};
use emordle_core::schemes::SchemeError;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use tokio::sync::Semaphore;

use crate::request::AnimationRequest;

pub const GIF_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub field: Option<&'static str>,
}

impl ApiError {
    fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code: "invalid_parameter",
            message: message.into(),
            field: Some(field),
        }
    }

    fn not_found(field: &'static str, message: impl Into<String>) -> Self {
        Self { status: StatusCode::NOT_FOUND, code: "not_found", message: message.into(), field: Some(field) }
    }

    fn internal() -> Self {
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "internal",
            message: "internal error".into(),
            field: None,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        let field = match &e {
            EngineError::Scheme(SchemeError::UnknownScheme(_)) => "scheme",
            EngineError::Layout(LayoutError::InvalidCanvas { width, .. }) => {
                if (MIN_CANVAS..=MAX_CANVAS).contains(width) {
                    "height"
                } else {
                    "width"
                }
            }
            EngineError::Render(RenderError::InvalidFps(_)) => "fps",
            EngineError::Render(RenderError::UnknownPalette(_)) => "palette",
            EngineError::Font(FontError::UnknownTypeface(_))
            | EngineError::Layout(LayoutError::Font(FontError::UnknownTypeface(_)))
            | EngineError::Render(RenderError::TypefaceMismatch { .. })
            | EngineError::Render(RenderError::Font(FontError::UnknownTypeface(_))) => "font",
            _ if e.is_input_error() => "id",
            _ => {
                tracing::error!(error = %e, "request failed");
                return ApiError::internal();
            }
        };
        ApiError::invalid(field, message)
    }
}

/// Uploaded word lists by content hash, mirrored to a directory when one is configured.
#[derive(Debug, Default)]
pub struct WordListStore {
    lists: RwLock<HashMap<String, Arc<WordList>>>,
    dir: Option<PathBuf>,
}

impl WordListStore {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { lists: RwLock::default(), dir }
    }

    pub fn content_id(list: &WordList) -> String {
        let digest = Sha256::digest(list.to_csv().as_bytes());
        digest[..16].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn insert(&self, list: WordList) -> Result<String, ApiError> {
        let id = Self::content_id(&list);
        if let Some(dir) = &self.dir {
            std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(dir.join(format!("{id}.csv")), list.to_csv()))
                .map_err(|e| {
                    tracing::error!(error = %e, "cannot persist word list");
                    ApiError::internal()
                })?;
        }
        self.lists.write().expect("store lock").insert(id.clone(), Arc::new(list));
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Result<Arc<WordList>, ApiError> {
        if let Some(list) = self.lists.read().expect("store lock").get(id) {
            return Ok(list.clone());
        }
        let missing = || ApiError::not_found("id", format!("no word list with id {id:?}"));
        let valid = id.len() == 32 && id.bytes().all(|b| b.is_ascii_hexdigit());
        let (Some(dir), true) = (&self.dir, valid) else {
            return Err(missing());
        };
        let bytes = std::fs::read(dir.join(format!("{id}.csv"))).map_err(|_| missing())?;
        let list = parse_named(&bytes, id).map_err(|_| missing())?;
        let list = Arc::new(list);
        self.lists.write().expect("store lock").insert(id.to_string(), list.clone());
        Ok(list)
    }
}

pub struct AppState {
    pub engine: Engine,
    pub store: WordListStore,
    pub gif_pool: Semaphore,
    pub gif_timeout: Duration,
}

impl AppState {
    pub fn new(engine: Engine, data_dir: Option<PathBuf>, gif_workers: usize) -> Self {
        Self {
            engine,
            store: WordListStore::new(data_dir),
            gif_pool: Semaphore::new(gif_workers.max(1)),
            gif_timeout: GIF_TIMEOUT,
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/wordlist", post(upload_word_list))
        .route("/api/schemes", get(list_schemes))
        .route("/api/layout", get(layout))
        .route("/api/descriptor", get(descriptor))
        .route("/api/gif", get(gif))
        .route("/api/palettes", get(palettes))
        .route("/api/fonts", get(fonts))
        .with_state(state)
}

/// Typed view of a query string; every failure names its parameter.
struct Params(HashMap<String, String>);

impl Params {
    fn raw(&self, name: &'static str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    fn required(&self, name: &'static str) -> Result<&str, ApiError> {
        self.raw(name).ok_or_else(|| ApiError::invalid(name, format!("missing parameter {name}")))
    }

    fn parsed<T: std::str::FromStr>(&self, name: &'static str, default: T) -> Result<T, ApiError> {
        match self.raw(name) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| ApiError::invalid(name, format!("invalid value {v:?} for {name}"))),
        }
    }

    fn level(&self, name: &'static str, default: f64) -> Result<f64, ApiError> {
        let v = self.parsed(name, default)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ApiError::invalid(name, format!("{name} must be a finite number")))
        }
    }

    fn request(&self) -> Result<AnimationRequest, ApiError> {
        let d = AnimationRequest::default();
        Ok(AnimationRequest {
            scheme: self.raw("scheme").map_or(d.scheme, str::to_string),
            speed: self.level("speed", d.speed)?,
            entropy: self.level("entropy", d.entropy)?,
            seed: self.parsed("seed", d.seed)?,
            width: self.parsed("width", d.width)?,
            height: self.parsed("height", d.height)?,
            fps: self.parsed("fps", d.fps)?,
            palette: self.raw("palette").map_or(d.palette, str::to_string),
            font: self.raw("font").map_or(d.font, str::to_string),
        })
    }
}

fn json_document(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

async fn upload_word_list(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let list = parse_named(&body, "upload").map_err(|e| ApiError::invalid("body", e.to_string()))?;
    let mut summary = json!({
        "word_count": list.len(),
        "words": list.entries,
    });
    summary["id"] = json!(state.store.insert(list)?);
    Ok((StatusCode::CREATED, Json(summary)).into_response())
}

async fn list_schemes(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let schemes: Vec<_> = state
        .engine
        .schemes
        .templates()
        .iter()
        .map(|t| {
            json!({
                "id": t.id,
                "emotion_label": t.emotion_label,
                "strategy": t.strategy,
                "varied_parameters": t.varied_parameters(),
            })
        })
        .collect();
    Json(json!(schemes))
}

async fn palettes() -> Json<serde_json::Value> {
    Json(json!(PALETTES))
}

async fn fonts(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!(state.engine.fonts.ids().collect::<Vec<_>>()))
}

async fn layout(
    State(state): State<Arc<AppState>>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let params = Params(query);
    let list = state.store.get(params.required("id")?)?;
    let req = params.request()?;
    let layout = state.engine.layout(&list, req.canvas(), req.seed, &req.font)?;
    Ok(json_document(export_layout(&layout)))
}

async fn descriptor(
    State(state): State<Arc<AppState>>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let params = Params(query);
    let list = state.store.get(params.required("id")?)?;
    let req = params.request()?;
    let animation = state.engine.generate(&list, req.canvas(), &req.spec())?;
    Ok(json_document(animation.document()))
}

async fn gif(
    State(state): State<Arc<AppState>>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let params = Params(query);
    let list = state.store.get(params.required("id")?)?;
    let req = params.request()?;
    let animation = state.engine.generate(&list, req.canvas(), &req.spec())?;

    let job = async {
        let _permit = state.gif_pool.acquire().await.map_err(|_| ApiError::internal())?;
        let worker = state.clone();
        tokio::task::spawn_blocking(move || worker.engine.render_gif(&animation, req.fps))
            .await
            .map_err(|_| ApiError::internal())?
            .map_err(ApiError::from)
    };
    let (bytes, _) = tokio::time::timeout(state.gif_timeout, job).await.map_err(|_| ApiError {
        status: StatusCode::SERVICE_UNAVAILABLE,
        code: "timeout",
        message: format!("GIF rendering did not finish within {} s", state.gif_timeout.as_secs()),
        field: None,
    })??;
    Ok(([(header::CONTENT_TYPE, "image/gif")], bytes).into_response())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_ids_ignore_line_endings() {
        let a = parse_named(b"sun,2\nrain,1\n", "a").unwrap();
        let b = parse_named(b"sun,2\r\nrain,1", "b").unwrap();
        assert_eq!(WordListStore::content_id(&a), WordListStore::content_id(&b));
        assert_eq!(WordListStore::content_id(&a).len(), 32);
    }

    #[test]
    fn store_reloads_from_directory() {
        let dir = tempfile::tempdir().unwrap();
        let list = parse_named(b"sun,2\nrain,1\n", "a").unwrap();
        let id = WordListStore::new(Some(dir.path().into())).insert(list.clone()).unwrap();
        let fresh = WordListStore::new(Some(dir.path().into()));
        assert_eq!(fresh.get(&id).unwrap().entries, list.entries);
        assert_eq!(fresh.get("../etc").unwrap_err().status, StatusCode::NOT_FOUND);
    }
}
