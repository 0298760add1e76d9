//! Client side of the external scorer protocol.
//!
//! Metrics talk to model backends only through the [`Scorer`] trait. Two
//! implementations ship here: [`HttpScorer`] for the JSON wire protocol and
//! [`MockScorer`] / [`FnScorer`] as deterministic in-process doubles.

mod http;
mod mock;
mod prompt;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use async_trait::async_trait;
use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use http::HttpScorer;
pub use mock::{text_pair_hash, FnScorer, MockScorer};
pub use prompt::render_nli_prompt;

/// Scorer role. Entailment returns P(entailment); Containment returns P("yes").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerKind {
    Entailment,
    Containment,
    EmbeddingSimilarity,
}

impl fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScorerKind::Entailment => "entailment",
            ScorerKind::Containment => "containment",
            ScorerKind::EmbeddingSimilarity => "embedding_similarity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScorerRequest {
    pub kind: ScorerKind,
    pub premise_or_context: String,
    pub hypothesis_or_query: String,
    pub request_id: String,
}

impl ScorerRequest {
    pub fn new(kind: ScorerKind, premise: impl Into<String>, hypothesis: impl Into<String>, request_id: impl Into<String>) -> Self {
        ScorerRequest {
            kind,
            premise_or_context: premise.into(),
            hypothesis_or_query: hypothesis.into(),
            request_id: request_id.into(),
        }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.premise_or_context.trim().is_empty() || self.hypothesis_or_query.trim().is_empty() {
            return Err(GatewayError::InvalidRequest {
                request_id: self.request_id.clone(),
                reason: "premise and hypothesis must be non-empty".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerResponse {
    pub request_id: String,
    pub probability: f64,
    pub latency_ms: f64,
    /// Number of retried attempts before this response.
    #[serde(default)]
    pub retries: u32,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GatewayError {
    #[error("request {request_id} timed out")]
    Timeout { request_id: String },
    #[error("malformed response to {request_id}: {reason}")]
    MalformedResponse { request_id: String, reason: String },
    #[error("scorer unreachable for {request_id}: {reason}")]
    Unreachable { request_id: String, reason: String },
    #[error("invalid request {request_id}: {reason}")]
    InvalidRequest { request_id: String, reason: String },
    #[error("no endpoint route configured for {0}")]
    UnconfiguredKind(ScorerKind),
}

/// Checks a backend probability without correcting it.
pub fn check_probability(request_id: &str, probability: Option<f64>) -> Result<f64, GatewayError> {
    match probability {
        Some(p) if (0.0..=1.0).contains(&p) => Ok(p),
        Some(p) => Err(GatewayError::MalformedResponse {
            request_id: request_id.to_string(),
            reason: format!("probability {p} outside [0, 1]"),
        }),
        None => Err(GatewayError::MalformedResponse {
            request_id: request_id.to_string(),
            reason: "missing probability".into(),
        }),
    }
}

#[async_trait]
pub trait Scorer: Send + Sync {
    async fn score(&self, request: &ScorerRequest) -> Result<ScorerResponse, GatewayError>;

    /// Upper bound on concurrent calls issued by [`Scorer::score_batch`].
    fn max_in_flight(&self) -> usize {
        1
    }

    /// Scores every request, at most `max_in_flight` at a time. Results are in
    /// input order; failures are reported per slot.
    async fn score_batch(&self, requests: &[ScorerRequest]) -> Vec<Result<ScorerResponse, GatewayError>> {
        stream::iter(0..requests.len())
            .map(|i| self.score(&requests[i]))
            .buffered(self.max_in_flight().max(1))
            .collect()
            .await
    }
}

#[async_trait]
impl<S: Scorer + ?Sized> Scorer for std::sync::Arc<S> {
    async fn score(&self, request: &ScorerRequest) -> Result<ScorerResponse, GatewayError> {
        (**self).score(request).await
    }

    fn max_in_flight(&self) -> usize {
        (**self).max_in_flight()
    }
}

mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerEndpointConfig {
    pub base_url: String,
    #[serde(rename = "timeout_ms", with = "duration_ms")]
    pub timeout: Duration,
    pub max_retries: u32,
    pub max_in_flight: usize,
    pub kind_routes: BTreeMap<ScorerKind, String>,
    /// Base delay of the exponential retry backoff.
    #[serde(rename = "backoff_ms", with = "duration_ms", default = "default_backoff")]
    pub backoff: Duration,
    /// Also send the rendered NLI prompt (as `prompt`) with entailment calls,
    /// for backends that take raw text.
    #[serde(default)]
    pub send_prompt: bool,
}

fn default_backoff() -> Duration {
    Duration::from_millis(100)
}

impl ScorerEndpointConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        let kind_routes = BTreeMap::from([
            (ScorerKind::Entailment, "/entailment".to_string()),
            (ScorerKind::Containment, "/containment".to_string()),
            (ScorerKind::EmbeddingSimilarity, "/similarity".to_string()),
        ]);
        ScorerEndpointConfig {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            timeout: Duration::from_secs(30),
            max_retries: 3,
            max_in_flight: 8,
            kind_routes,
            backoff: default_backoff(),
            send_prompt: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.max_in_flight < 1 {
            return Err("max_in_flight must be at least 1".into());
        }
        if self.base_url.is_empty() {
            return Err("base_url must be set".into());
        }
        Ok(())
    }

    pub fn url_for(&self, kind: ScorerKind) -> Option<String> {
        self.kind_routes.get(&kind).map(|route| format!("{}{}", self.base_url, route))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_checks_are_strict() {
        assert_eq!(check_probability("r", Some(0.42)), Ok(0.42));
        assert_eq!(check_probability("r", Some(1.0)), Ok(1.0));
        assert!(matches!(check_probability("r", Some(1.3)), Err(GatewayError::MalformedResponse { .. })));
        assert!(matches!(check_probability("r", Some(f64::NAN)), Err(GatewayError::MalformedResponse { .. })));
        assert!(matches!(check_probability("r", None), Err(GatewayError::MalformedResponse { .. })));
    }

    #[test]
    fn config_round_trips_and_routes() {
        let cfg = ScorerEndpointConfig::new("http://localhost:9000/");
        assert_eq!(cfg.url_for(ScorerKind::Containment).unwrap(), "http://localhost:9000/containment");
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ScorerEndpointConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        let mut bad = cfg;
        bad.max_in_flight = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_texts_are_rejected() {
        let req = ScorerRequest::new(ScorerKind::Entailment, "", "h", "1");
        assert!(req.validate().is_err());
    }
}
