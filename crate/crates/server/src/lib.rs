//! HTTP/JSON service over the splitaudit pipeline.
//!
//! | Method | Path | Body / query |
//! |---|---|---|
//! | GET  | `/api/v1/health` | |
//! | POST | `/api/v1/datasets` | `path` or `csv`, `mapping`, `preprocess`, `skip_malformed` |
//! | POST | `/api/v1/splits` | `dataset`, `split`, optional `preprocess` |
//! | POST | `/api/v1/bundles` | `path`, `prefix`, `mapping`, `dataset` (register a bundle directory) |
//! | GET  | `/api/v1/bundles` | |
//! | POST | `/api/v1/thresholds` | threshold config, bare or as a document |
//! | POST | `/api/v1/compare` | `bundles`, `allow_provenance_mismatch` |
//! | GET  | `/api/v1/{id}/stats`, `temporal`, `repeats` | `role`, `reference` |
//! | GET  | `/api/v1/{id}/timeline` | `roles`, `granularity`, `start`, `end` |
//! | GET  | `/api/v1/{bundle}/leakage`, `coldstart` | `eval`, `granularity` |
//! | GET  | `/api/v1/{bundle}/shift` | `eval` |
//! | GET  | `/api/v1/{bundle}/split`, `audit` | `granularity` (audit) |
//! | GET  | `/api/v1/{bundle}/summary` | `thresholds` (inline JSON or id), `granularity` |
//!
//! GET bodies are versioned report documents. Errors are
//! `{"error": {"code", "message"}}` with 400, 404 or 413.

mod api;
mod error;
mod state;

use std::net::SocketAddr;

use axum::extract::DefaultBodyLimit;
use axum::routing::{get, post};
use axum::Router;
use tower_http::cors::CorsLayer;

pub use error::ApiError;
pub use state::{AppState, Bundle, BundleSummary, Dataset, ServerConfig};

pub fn router(state: AppState) -> Router {
    let limit = state.config.max_body_bytes;
    Router::new()
        .route("/api/v1/health", get(api::health))
        .route("/api/v1/datasets", post(api::register_dataset))
        .route("/api/v1/splits", post(api::create_split))
        .route("/api/v1/bundles", post(api::register_bundle).get(api::list_bundles))
        .route("/api/v1/thresholds", post(api::register_thresholds))
        .route("/api/v1/compare", post(api::compare))
        .route("/api/v1/{id}/{diagnostic}", get(api::diagnostic))
        .layer(DefaultBodyLimit::max(limit))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Bind and serve until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServerConfig) -> std::io::Result<()> {
    let state = AppState::new(config);
    let restored = state.restore().map_err(|e| std::io::Error::other(e.to_string()))?;
    if restored > 0 {
        tracing::info!(restored, "reloaded persisted bundles");
    }
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
