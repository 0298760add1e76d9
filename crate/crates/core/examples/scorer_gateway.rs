//! Talk to a scorer backend over the JSON wire protocol. Without arguments an
//! in-process backend is started that fails every first attempt; pass a base
//! URL to score against a real service instead.

use std::future::IntoFuture;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::post;
use axum::{Json, Router};
use fusebench::gateway::{HttpScorer, Scorer, ScorerEndpointConfig, ScorerKind, ScorerRequest};
use serde_json::{json, Value};

async fn toy_backend() -> std::io::Result<String> {
    let attempts = Arc::new(AtomicUsize::new(0));
    let handler = move |Json(req): Json<Value>| {
        let attempts = attempts.clone();
        async move {
            if attempts.fetch_add(1, Ordering::SeqCst) % 2 == 0 {
                return StatusCode::SERVICE_UNAVAILABLE.into_response();
            }
            let overlap = req["hypothesis"].as_str().unwrap_or_default().split_whitespace().filter(|w| req["premise"].as_str().unwrap_or_default().contains(w)).count();
            Json(json!({"request_id": req["request_id"], "probability": (overlap as f64 / 4.0).min(1.0)})).into_response()
        }
    };
    let app = Router::new().route("/entailment", post(handler.clone())).route("/containment", post(handler));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    tokio::spawn(axum::serve(listener, app).into_future());
    Ok(base)
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = match std::env::args().nth(1) {
        Some(url) => url,
        None => toy_backend().await?,
    };
    let mut config = ScorerEndpointConfig::new(&base);
    config.backoff = Duration::from_millis(20);
    config.max_in_flight = 2;
    println!("config: {}", serde_json::to_string(&config)?);
    let scorer = HttpScorer::new(config)?;

    let premise = "The pool was great. Staff were rude.";
    let requests: Vec<ScorerRequest> = ["The pool was great.", "Staff were friendly.", "Breakfast was included."]
        .iter()
        .enumerate()
        .map(|(i, h)| ScorerRequest::new(ScorerKind::Entailment, premise, *h, format!("demo-{i}")))
        .collect();
    for (req, result) in requests.iter().zip(scorer.score_batch(&requests).await) {
        match result {
            Ok(r) => println!("{:<26} p={:.2} retries={} latency={:.1}ms", req.hypothesis_or_query, r.probability, r.retries, r.latency_ms),
            Err(e) => println!("{:<26} error: {e}", req.hypothesis_or_query),
        }
    }
    Ok(())
}
