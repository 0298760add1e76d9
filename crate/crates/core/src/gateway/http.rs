use std::time::Instant;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;

use super::{check_probability, render_nli_prompt, GatewayError, Scorer, ScorerEndpointConfig, ScorerKind, ScorerRequest, ScorerResponse};

#[derive(Serialize)]
struct WireRequest<'a> {
    kind: ScorerKind,
    premise: &'a str,
    hypothesis: &'a str,
    request_id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    prompt: Option<String>,
}

#[derive(Deserialize)]
struct WireResponse {
    request_id: Option<String>,
    probability: Option<f64>,
}

enum Attempt {
    Done(Result<ScorerResponse, GatewayError>),
    Retry(GatewayError),
}

/// Scorer speaking the JSON wire protocol over HTTP.
///
/// The handle is cheap to share; concurrent calls across all clones of the
/// same handle are capped at `max_in_flight`.
pub struct HttpScorer {
    config: ScorerEndpointConfig,
    client: reqwest::Client,
    permits: Semaphore,
}

impl HttpScorer {
    pub fn new(config: ScorerEndpointConfig) -> Result<Self, String> {
        config.validate()?;
        let client = reqwest::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| e.to_string())?;
        let permits = Semaphore::new(config.max_in_flight);
        Ok(HttpScorer { config, client, permits })
    }

    pub fn config(&self) -> &ScorerEndpointConfig {
        &self.config
    }

    async fn attempt(&self, url: &str, request: &ScorerRequest) -> Attempt {
        let id = request.request_id.clone();
        let prompt = (self.config.send_prompt && request.kind == ScorerKind::Entailment)
            .then(|| render_nli_prompt(&request.premise_or_context, &request.hypothesis_or_query));
        let body = WireRequest {
            kind: request.kind,
            premise: &request.premise_or_context,
            hypothesis: &request.hypothesis_or_query,
            request_id: &request.request_id,
            prompt,
        };
        let started = Instant::now();
        let response = match self.client.post(url).json(&body).send().await {
            Ok(r) => r,
            Err(e) if e.is_timeout() => return Attempt::Retry(GatewayError::Timeout { request_id: id }),
            Err(e) => return Attempt::Retry(GatewayError::Unreachable { request_id: id, reason: e.to_string() }),
        };
        let status = response.status();
        if status.is_server_error() {
            return Attempt::Retry(GatewayError::Unreachable { request_id: id, reason: format!("HTTP {status}") });
        }
        if !status.is_success() {
            return Attempt::Done(Err(GatewayError::Unreachable { request_id: id, reason: format!("HTTP {status}") }));
        }
        let bytes = match response.bytes().await {
            Ok(b) => b,
            Err(e) if e.is_timeout() => return Attempt::Retry(GatewayError::Timeout { request_id: id }),
            Err(e) => return Attempt::Retry(GatewayError::Unreachable { request_id: id, reason: e.to_string() }),
        };
        let latency_ms = started.elapsed().as_secs_f64() * 1000.0;
        let wire: WireResponse = match serde_json::from_slice(&bytes) {
            Ok(w) => w,
            Err(e) => {
                return Attempt::Done(Err(GatewayError::MalformedResponse { request_id: id, reason: e.to_string() }));
            }
        };
        if let Some(echo) = &wire.request_id {
            if echo != &id {
                return Attempt::Done(Err(GatewayError::MalformedResponse {
                    request_id: id,
                    reason: format!("response carries request_id `{echo}`"),
                }));
            }
        }
        Attempt::Done(
            check_probability(&id, wire.probability)
                .map(|probability| ScorerResponse { request_id: id, probability, latency_ms, retries: 0 }),
        )
    }
}

#[async_trait]
impl Scorer for HttpScorer {
    async fn score(&self, request: &ScorerRequest) -> Result<ScorerResponse, GatewayError> {
        request.validate()?;
        let url = self.config.url_for(request.kind).ok_or(GatewayError::UnconfiguredKind(request.kind))?;
        let _permit = self.permits.acquire().await.expect("semaphore never closed");
        let mut retries = 0;
        loop {
            match self.attempt(&url, request).await {
                Attempt::Done(result) => {
                    return result.map(|mut r| {
                        r.retries = retries;
                        r
                    })
                }
                Attempt::Retry(err) if retries >= self.config.max_retries => return Err(err),
                Attempt::Retry(err) => {
                    tracing::debug!(request_id = %request.request_id, error = %err, "retrying scorer call");
                    let delay = self.config.backoff.saturating_mul(1 << retries.min(10));
                    tokio::time::sleep(delay).await;
                    retries += 1;
                }
            }
        }
    }

    fn max_in_flight(&self) -> usize {
        self.config.max_in_flight
    }
}
