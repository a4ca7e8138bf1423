use occupancy_service::{app, ServiceConfig};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    tracing_subscriber::fmt::init();
    let bind = std::env::var("OCCUPANCY_BIND").unwrap_or_else(|_| "127.0.0.1:8080".into());
    let config = ServiceConfig::from_env();
    let listener = tokio::net::TcpListener::bind(&bind).await?;
    tracing::info!(%bind, cors = ?config.cors_origin, "listening");
    axum::serve(listener, app(&config)).await
}
