//! HttpScorer against a scripted in-process backend.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use fusebench::gateway::{GatewayError, HttpScorer, Scorer, ScorerEndpointConfig, ScorerKind, ScorerRequest};
use serde_json::{json, Value};

#[derive(Default)]
struct Backend {
    calls: Mutex<HashMap<String, usize>>,
    in_flight: AtomicUsize,
    peak: AtomicUsize,
}

async fn handle(State(b): State<Arc<Backend>>, Json(req): Json<Value>) -> Response {
    let premise = req["premise"].as_str().unwrap_or_default().to_string();
    let id = req["request_id"].as_str().unwrap_or_default().to_string();
    let n = {
        let mut calls = b.calls.lock().unwrap();
        let c = calls.entry(id.clone()).or_default();
        *c += 1;
        *c
    };
    let now = b.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    b.peak.fetch_max(now, Ordering::SeqCst);
    let out = match premise.as_str() {
        "flaky" if n <= 2 => StatusCode::SERVICE_UNAVAILABLE.into_response(),
        "slow" => {
            tokio::time::sleep(Duration::from_millis(400)).await;
            Json(json!({"request_id": id, "probability": 0.5})).into_response()
        }
        "busy" => {
            tokio::time::sleep(Duration::from_millis(30)).await;
            Json(json!({"request_id": id, "probability": 0.25})).into_response()
        }
        "garbage" => "not json".into_response(),
        "out-of-range" => Json(json!({"request_id": id, "probability": 1.5})).into_response(),
        "missing" => Json(json!({"request_id": id})).into_response(),
        "client-error" => StatusCode::BAD_REQUEST.into_response(),
        "wrong-id" => Json(json!({"request_id": "someone-else", "probability": 0.5})).into_response(),
        "prompt" => Json(json!({"request_id": id, "probability": if req.get("prompt").is_some() { 1.0 } else { 0.0 }})).into_response(),
        _ => Json(json!({"request_id": id, "probability": 0.7})).into_response(),
    };
    b.in_flight.fetch_sub(1, Ordering::SeqCst);
    out
}

async fn spawn() -> (String, Arc<Backend>) {
    let backend = Arc::new(Backend::default());
    let app = Router::new()
        .route("/entailment", post(handle))
        .route("/containment", post(handle))
        .with_state(backend.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (format!("http://{addr}"), backend)
}

fn scorer(base: &str) -> HttpScorer {
    let mut cfg = ScorerEndpointConfig::new(base);
    cfg.timeout = Duration::from_millis(150);
    cfg.backoff = Duration::from_millis(5);
    cfg.max_retries = 3;
    HttpScorer::new(cfg).unwrap()
}

fn req(premise: &str, id: &str) -> ScorerRequest {
    ScorerRequest::new(ScorerKind::Entailment, premise, "the hypothesis", id)
}

fn calls(b: &Backend, id: &str) -> usize {
    b.calls.lock().unwrap().get(id).copied().unwrap_or(0)
}

#[tokio::test]
async fn happy_path_and_retries() {
    let (base, backend) = spawn().await;
    let s = scorer(&base);
    let r = s.score(&req("fine", "a")).await.unwrap();
    assert_eq!((r.request_id.as_str(), r.probability, r.retries), ("a", 0.7, 0));

    let r = s.score(&req("flaky", "b")).await.unwrap();
    assert_eq!(r.retries, 2);
    assert_eq!(calls(&backend, "b"), 3);
}

#[tokio::test]
async fn timeouts_are_retried_then_reported() {
    let (base, backend) = spawn().await;
    let s = scorer(&base);
    let err = s.score(&req("slow", "t")).await.unwrap_err();
    assert_eq!(err, GatewayError::Timeout { request_id: "t".into() });
    assert_eq!(calls(&backend, "t"), 4);
}

#[tokio::test]
async fn malformed_responses_are_not_corrected() {
    let (base, backend) = spawn().await;
    let s = scorer(&base);
    for premise in ["garbage", "out-of-range", "missing", "wrong-id"] {
        let err = s.score(&req(premise, premise)).await.unwrap_err();
        assert!(matches!(err, GatewayError::MalformedResponse { ref request_id, .. } if request_id == premise), "{premise}: {err:?}");
        assert_eq!(calls(&backend, premise), 1, "{premise} must not be retried");
    }
}

#[tokio::test]
async fn client_errors_fail_without_retry() {
    let (base, backend) = spawn().await;
    let err = scorer(&base).score(&req("client-error", "c")).await.unwrap_err();
    assert!(matches!(err, GatewayError::Unreachable { .. }));
    assert_eq!(calls(&backend, "c"), 1);
}

#[tokio::test]
async fn unreachable_backend() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let err = scorer(&format!("http://{addr}")).score(&req("fine", "u")).await.unwrap_err();
    assert!(matches!(err, GatewayError::Unreachable { .. } | GatewayError::Timeout { .. }));
}

#[tokio::test]
async fn invalid_requests_and_routes() {
    let (base, backend) = spawn().await;
    let s = scorer(&base);
    let err = s.score(&ScorerRequest::new(ScorerKind::Entailment, " ", "h", "e")).await.unwrap_err();
    assert!(matches!(err, GatewayError::InvalidRequest { .. }));
    assert_eq!(calls(&backend, "e"), 0);

    let mut cfg = ScorerEndpointConfig::new(&base);
    cfg.kind_routes.remove(&ScorerKind::Containment);
    let s = HttpScorer::new(cfg).unwrap();
    let err = s.score(&ScorerRequest::new(ScorerKind::Containment, "p", "h", "k")).await.unwrap_err();
    assert_eq!(err, GatewayError::UnconfiguredKind(ScorerKind::Containment));
}

#[tokio::test]
async fn batch_respects_in_flight_cap_and_order() {
    let (base, backend) = spawn().await;
    let mut cfg = ScorerEndpointConfig::new(&base);
    cfg.max_in_flight = 2;
    let s = HttpScorer::new(cfg).unwrap();
    let mut requests: Vec<_> = (0..10).map(|i| req("busy", &format!("q{i}"))).collect();
    requests.push(req("garbage", "bad"));
    let out = s.score_batch(&requests).await;
    assert_eq!(out.len(), 11);
    for (i, r) in out[..10].iter().enumerate() {
        let r = r.as_ref().unwrap();
        assert_eq!(r.request_id, format!("q{i}"));
        assert_eq!(r.probability, 0.25);
    }
    assert!(out[10].is_err());
    assert!(backend.peak.load(Ordering::SeqCst) <= 2);
}

#[tokio::test]
async fn prompt_is_sent_only_when_configured() {
    let (base, _) = spawn().await;
    assert_eq!(scorer(&base).score(&req("prompt", "p0")).await.unwrap().probability, 0.0);
    let mut cfg = ScorerEndpointConfig::new(&base);
    cfg.send_prompt = true;
    assert_eq!(HttpScorer::new(cfg).unwrap().score(&req("prompt", "p1")).await.unwrap().probability, 1.0);
}
