//! Starts the HTTP service with model calls answered from the recorded atom
//! transcript, so the review UI can be exercised without network access.
//!
//! ```sh
//! cargo run --example serve
//! curl -X POST localhost:8080/sessions
//! ```

use std::path::PathBuf;
use std::sync::Arc;

use cwgen::gateway::ReplayGateway;
use cwgen::service::{serve, AppState, ServiceConfig, Store, DEFAULT_PORT};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let gateway = Arc::new(ReplayGateway::load(
        &fixtures.join("atom_transcript.jsonl"),
    )?);
    let data_dir = std::env::temp_dir().join("cwgen-example-data");
    let store = Store::open(&data_dir)?;
    let config = ServiceConfig {
        port: DEFAULT_PORT,
        host: "127.0.0.1".into(),
        data_dir,
        cors_origin: Some("http://localhost:5173".into()),
    };
    eprintln!("listening on http://{}:{}", config.host, config.port);
    serve(config, AppState::new(store, Some(gateway))).await?;
    Ok(())
}
