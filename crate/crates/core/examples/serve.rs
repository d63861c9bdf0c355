//! Serve the exhibit rules over HTTP on port 8787.
//!
//! cargo run --example serve
//! curl -s localhost:8787/v1/rules
//! curl -s -XPOST localhost:8787/v1/sessions -H 'content-type: application/json' \
//!   -d '{"rule_id":"exhibit1/item1","learner_id":"me","episodes_target":3}'

use std::path::PathBuf;

use rulegame::service::{serve, ServiceConfig};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    serve(ServiceConfig {
        rules_dir: Some(root.join("rules")),
        data_dir: std::env::temp_dir().join("rulegame-sessions"),
        ..ServiceConfig::default()
    })
    .await
}
