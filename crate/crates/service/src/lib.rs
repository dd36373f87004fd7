//! JSON API for reviewing detected subtitle issues.

mod api;
mod error;
mod store;

use std::future::Future;
use std::sync::Arc;

pub use api::{
    create, router, AssetLinks, CreateProject, CueView, DecisionRequest, EditRequest, ExportResponse, IssuePage,
    IssueView, ProjectSummary, ACTOR_HEADER,
};
pub use error::{ApiError, ErrorBody};
pub use store::{Record, Store};

/// Serves the API on `listener` until `shutdown` resolves, then flushes
/// every project to disk.
pub async fn serve(
    listener: tokio::net::TcpListener,
    store: Arc<Store>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(store.clone()))
        .with_graceful_shutdown(shutdown)
        .await?;
    store.flush().map_err(|e| std::io::Error::other(e.to_string()))
}
