//! Transports for the session protocol: HTTP (`POST /rpc`) and line-delimited stdio.

use std::sync::Arc;

use axum::extract::State;
use axum::http::header;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::Router;
use muwb_core::session::protocol::Server;
use tokio::io::{AsyncBufReadExt, AsyncWriteExt, BufReader};

pub const DEFAULT_BIND: &str = "127.0.0.1:7878";

async fn rpc(State(server): State<Arc<Server>>, body: String) -> impl IntoResponse {
    // tactics may take a while; keep the runtime free for other sessions
    let reply = tokio::task::spawn_blocking(move || server.handle_line(&body))
        .await
        .unwrap_or_else(|e| format!(r#"{{"ok":false,"error":{{"kind":"Internal","message":"{e}"}}}}"#));
    ([(header::CONTENT_TYPE, "application/json")], reply)
}

pub fn router(server: Arc<Server>) -> Router {
    Router::new()
        .route("/rpc", post(rpc))
        .route("/health", get(|| async { "ok" }))
        .with_state(server)
}

pub async fn serve_http(listener: tokio::net::TcpListener, server: Arc<Server>) -> std::io::Result<()> {
    axum::serve(listener, router(server)).await
}

/// One request per input line, one reply per output line, until end of input.
pub async fn serve_stdio(server: Arc<Server>) -> std::io::Result<()> {
    let mut lines = BufReader::new(tokio::io::stdin()).lines();
    let mut out = tokio::io::stdout();
    while let Some(line) = lines.next_line().await? {
        if line.trim().is_empty() {
            continue;
        }
        let s = server.clone();
        let reply = tokio::task::spawn_blocking(move || s.handle_line(&line))
            .await
            .map_err(std::io::Error::other)?;
        out.write_all(reply.as_bytes()).await?;
        out.write_all(b"\n").await?;
        out.flush().await?;
    }
    Ok(())
}
