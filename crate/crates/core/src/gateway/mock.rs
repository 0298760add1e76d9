use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use async_trait::async_trait;

use super::{check_probability, GatewayError, Scorer, ScorerKind, ScorerRequest, ScorerResponse};

/// FNV-1a over `premise \0 hypothesis`; stable across runs and platforms.
pub fn text_pair_hash(premise: &str, hypothesis: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0100_0000_01b3;
    premise
        .as_bytes()
        .iter()
        .chain(std::iter::once(&0u8))
        .chain(hypothesis.as_bytes())
        .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}

/// Scripted in-process scorer. Unknown pairs fall back to a per-kind default,
/// then to the global default.
#[derive(Debug, Default)]
pub struct MockScorer {
    script: HashMap<(ScorerKind, u64), f64>,
    kind_defaults: HashMap<ScorerKind, f64>,
    default: f64,
    calls: AtomicUsize,
}

impl MockScorer {
    pub fn constant(default: f64) -> Self {
        MockScorer { default, ..Default::default() }
    }

    pub fn with_kind_default(mut self, kind: ScorerKind, probability: f64) -> Self {
        self.kind_defaults.insert(kind, probability);
        self
    }

    pub fn script(mut self, kind: ScorerKind, premise: &str, hypothesis: &str, probability: f64) -> Self {
        self.script.insert((kind, text_pair_hash(premise, hypothesis)), probability);
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    fn lookup(&self, request: &ScorerRequest) -> f64 {
        let key = (request.kind, text_pair_hash(&request.premise_or_context, &request.hypothesis_or_query));
        self.script
            .get(&key)
            .or_else(|| self.kind_defaults.get(&request.kind))
            .copied()
            .unwrap_or(self.default)
    }
}

#[async_trait]
impl Scorer for MockScorer {
    async fn score(&self, request: &ScorerRequest) -> Result<ScorerResponse, GatewayError> {
        request.validate()?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        let probability = check_probability(&request.request_id, Some(self.lookup(request)))?;
        Ok(ScorerResponse { request_id: request.request_id.clone(), probability, latency_ms: 0.0, retries: 0 })
    }

    fn max_in_flight(&self) -> usize {
        4
    }
}

/// Scorer backed by a closure, for tests that compute probabilities from the
/// request itself.
pub struct FnScorer<F> {
    f: F,
}

impl<F> FnScorer<F>
where
    F: Fn(&ScorerRequest) -> Result<f64, GatewayError> + Send + Sync,
{
    pub fn new(f: F) -> Self {
        FnScorer { f }
    }
}

#[async_trait]
impl<F> Scorer for FnScorer<F>
where
    F: Fn(&ScorerRequest) -> Result<f64, GatewayError> + Send + Sync,
{
    async fn score(&self, request: &ScorerRequest) -> Result<ScorerResponse, GatewayError> {
        request.validate()?;
        let p = (self.f)(request)?;
        let probability = check_probability(&request.request_id, Some(p))?;
        Ok(ScorerResponse { request_id: request.request_id.clone(), probability, latency_ms: 0.0, retries: 0 })
    }

    fn max_in_flight(&self) -> usize {
        4
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(kind: ScorerKind, p: &str, h: &str) -> ScorerRequest {
        ScorerRequest::new(kind, p, h, "r")
    }

    #[tokio::test]
    async fn scripted_and_default_values() {
        let mock = MockScorer::constant(0.5).script(ScorerKind::Entailment, "p", "h", 0.9);
        assert_eq!(mock.score(&req(ScorerKind::Entailment, "p", "h")).await.unwrap().probability, 0.9);
        assert_eq!(mock.score(&req(ScorerKind::Containment, "p", "h")).await.unwrap().probability, 0.5);
        assert_eq!(mock.score(&req(ScorerKind::Entailment, "x", "y")).await.unwrap().probability, 0.5);
        assert_eq!(mock.calls(), 3);
    }

    #[tokio::test]
    async fn repeated_calls_agree() {
        let mock = MockScorer::constant(0.3).with_kind_default(ScorerKind::Containment, 0.8);
        let a = mock.score(&req(ScorerKind::Containment, "p", "h")).await.unwrap();
        let b = mock.score(&req(ScorerKind::Containment, "p", "h")).await.unwrap();
        assert_eq!(a, b);
        assert_eq!(a.probability, 0.8);
    }

    #[test]
    fn hash_is_order_sensitive() {
        assert_ne!(text_pair_hash("ab", "c"), text_pair_hash("a", "bc"));
        assert_eq!(text_pair_hash("ab", "c"), text_pair_hash("ab", "c"));
    }

    #[tokio::test]
    async fn out_of_range_script_is_an_error() {
        let mock = MockScorer::constant(1.5);
        assert!(matches!(mock.score(&req(ScorerKind::Entailment, "p", "h")).await, Err(GatewayError::MalformedResponse { .. })));
    }

    #[tokio::test]
    async fn batch_preserves_order() {
        let scorer = FnScorer::new(|r: &ScorerRequest| Ok(r.request_id.parse::<f64>().unwrap() / 10.0));
        let reqs: Vec<_> = (0..3).map(|i| ScorerRequest::new(ScorerKind::Entailment, "p", "h", i.to_string())).collect();
        let out: Vec<f64> = scorer.score_batch(&reqs).await.into_iter().map(|r| r.unwrap().probability).collect();
        assert_eq!(out, vec![0.0, 0.1, 0.2]);
    }
}
