//! HTTP/JSON job service for the ERGM engine.
//!
//! Networks are uploaded once and referenced by id; fits, goodness-of-fit
//! runs, simulations and model selections run as background jobs whose
//! result documents are fetched when done.

pub mod engine;
pub mod jobs;
mod routes;

use std::net::SocketAddr;

pub use jobs::{JobKind, JobRequest, JobStatus, JobView, NetworkView, ServiceConfig, Store};
pub use routes::{router, NetworkUpload};

/// Builds the router over a fresh store.
pub fn app(config: ServiceConfig) -> axum::Router {
    router(Store::new(config))
}

pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app(config)).await
}

/// Runs the service on its own runtime until the process is stopped.
pub fn serve_blocking(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?
        .block_on(serve(addr, config))
}
