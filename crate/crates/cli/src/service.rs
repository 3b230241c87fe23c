//! HTTP API backing the authoring UI.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use streetweave::pipeline::{prepare, DataOverrides};
use streetweave::render::Viewport;
use streetweave::Error;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::config::Config;
use crate::geocoder::{GeocodeError, Geocoder};
use crate::{render_document, OutputFormat, RenderSettings};

pub struct AppState {
    pub config: Config,
    pub geocoder: Geocoder,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        let geocoder = Geocoder::new(config.geocoder_url.clone(), config.cache_dir.clone());
        AppState { config, geocoder }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct InlineData {
    pub physical: Option<String>,
    pub thematic: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct ViewportRequest {
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RenderRequest {
    pub spec: Value,
    #[serde(default)]
    pub data: Option<InlineData>,
    #[serde(default)]
    pub output: OutputFormat,
    #[serde(default)]
    pub zoom: Option<u8>,
    #[serde(default)]
    pub viewport: Option<ViewportRequest>,
}

pub fn router(state: Arc<AppState>) -> Router {
    let static_dir = state.config.static_dir.clone();
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/validate", post(validate))
        .route("/api/render", post(render))
        .route("/api/geocode", get(geocode))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(CorsLayer::permissive())
}

/// HTTP status for an engine error.
pub fn status_for(err: &Error) -> StatusCode {
    match err {
        Error::Spec(_) => StatusCode::BAD_REQUEST,
        Error::Geocode(_) => StatusCode::BAD_GATEWAY,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

fn error_response(err: &Error) -> Response {
    let body = json!({ "error": err.to_string(), "diagnostics": err.diagnostics() });
    (status_for(err), Json(body)).into_response()
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

async fn validate(body: String) -> Response {
    match prepare(&body) {
        Ok(p) => Json(json!({ "valid": true, "diagnostics": p.warnings })).into_response(),
        Err(e) => {
            (StatusCode::BAD_REQUEST, Json(json!({ "valid": false, "diagnostics": e.diagnostics() }))).into_response()
        }
    }
}

async fn render(State(state): State<Arc<AppState>>, body: String) -> Response {
    let req: RenderRequest = match serde_json::from_str(&body) {
        Ok(r) => r,
        Err(e) => {
            let diag = json!({ "severity": "error", "path": "", "message": format!("invalid render request: {e}") });
            return (StatusCode::BAD_REQUEST, Json(json!({ "error": "invalid render request", "diagnostics": [diag] })))
                .into_response();
        }
    };
    if let Some(v) = req.viewport {
        if !(v.width > 0.0 && v.height > 0.0) {
            return error_response(&Error::Viewport);
        }
    }
    let data = req.data.unwrap_or_default();
    let settings = RenderSettings {
        format: req.output,
        zoom: req.zoom.unwrap_or(state.config.nominal_zoom).min(22),
        nominal_zoom: state.config.nominal_zoom,
        viewport: req.viewport.map_or_else(Viewport::default, |v| Viewport { width: v.width, height: v.height }),
        base_dir: state.config.data_dir.clone(),
        overrides: DataOverrides { physical: data.physical, thematic: data.thematic },
    };
    let text = req.spec.to_string();
    match render_document(&text, &settings, &state.geocoder).await {
        Ok(out) => {
            let ctype = match req.output {
                OutputFormat::Plan => "application/json",
                OutputFormat::Svg => "image/svg+xml",
            };
            ([(header::CONTENT_TYPE, ctype)], out).into_response()
        }
        Err(e) => error_response(&e),
    }
}

async fn geocode(State(state): State<Arc<AppState>>, Query(params): Query<HashMap<String, String>>) -> Response {
    let q = params.get("q").map(String::as_str).unwrap_or("");
    match state.geocoder.geocode(q).await {
        Ok(r) => Json(r).into_response(),
        Err(e) => {
            let status = match e {
                GeocodeError::EmptyQuery | GeocodeError::RemoteDisabled(_) => StatusCode::BAD_REQUEST,
                GeocodeError::NotFound(_) => StatusCode::NOT_FOUND,
                GeocodeError::Unavailable(_) => StatusCode::BAD_GATEWAY,
            };
            (status, Json(json!({ "error": e.to_string() }))).into_response()
        }
    }
}

/// Bind and serve until interrupted.
pub async fn serve(config: Config) -> std::io::Result<()> {
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    let app = router(Arc::new(AppState::new(config)));
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
