//! HTTP front-end for composing environments against one catalog.
//!
//! Every route lives under `/v1/`. Sessions hold an environment in memory;
//! each mutating request carries the revision it was based on and is
//! rejected with 409 if the session has moved on. Errors are returned as
//! `{"error": {"code": ..., "message": ...}}` where `code` is the core
//! error name.

mod error;
mod routes;
mod state;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

pub use error::{status_for, ApiError};
pub use routes::router;
pub use state::{AppState, Session};

use vso_core::{store, KnowledgeBase};

pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    pub catalog: PathBuf,
    pub vocabularies: Vec<PathBuf>,
}

impl ServiceConfig {
    /// Reads `VSO_ADDR` (optional) and `VSO_CATALOG` (required).
    pub fn from_env() -> Result<Self, String> {
        let addr = std::env::var("VSO_ADDR").unwrap_or_else(|_| DEFAULT_ADDR.into());
        let catalog = std::env::var("VSO_CATALOG").map_err(|_| "VSO_CATALOG is not set".to_owned())?;
        Ok(ServiceConfig {
            addr: addr.parse().map_err(|e| format!("VSO_ADDR `{addr}`: {e}"))?,
            catalog: catalog.into(),
            vocabularies: Vec::new(),
        })
    }

    /// Loads and validates the catalog and vocabulary files.
    pub fn load_state(&self) -> Result<AppState, String> {
        let read = |p: &PathBuf| std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()));
        let catalog = store::load_catalog(&read(&self.catalog)?)
            .map_err(|e| format!("{}: {e}", self.catalog.display()))?;
        let kb = KnowledgeBase::new(catalog).map_err(|e| e.to_string())?;
        let mut state = AppState::new(kb);
        for path in &self.vocabularies {
            let vocab =
                store::load_vocabulary(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
            state = state.with_vocabulary(vocab);
        }
        Ok(state)
    }
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
