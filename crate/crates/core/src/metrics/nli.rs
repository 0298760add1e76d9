//! Highlight faithfulness and coverage computed through a [`Scorer`].

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::corpus::{FicInstance, SystemOutput};
use crate::gateway::{Scorer, ScorerKind, ScorerRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CoverageMode {
    /// One containment call per highlight against the whole passage.
    #[default]
    Trained,
    /// One entailment call per highlight with the passage as premise.
    Nli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FaithfulnessMode {
    /// Entailment with concatenated highlights as premise, one call per sentence.
    #[default]
    Nli,
    /// Containment of each output sentence in the concatenated highlights.
    Trained,
}

/// Overall score and its per-unit components (sentences or highlights).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitScores {
    pub overall: f64,
    pub per_unit: Vec<f64>,
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

async fn run(scorer: &dyn Scorer, unit: &'static str, requests: Vec<ScorerRequest>) -> Result<UnitScores, MetricError> {
    let responses = scorer.score_batch(&requests).await;
    let mut per_unit = Vec::with_capacity(responses.len());
    for (index, response) in responses.into_iter().enumerate() {
        match response {
            Ok(r) => per_unit.push(r.probability),
            Err(source) => return Err(MetricError::Gateway { unit, index, source }),
        }
    }
    Ok(UnitScores { overall: mean(&per_unit), per_unit })
}

fn premise(instance: &FicInstance) -> Result<String, MetricError> {
    let premise = instance.concatenated_highlights();
    if premise.trim().is_empty() {
        return Err(MetricError::EmptyHighlights(instance.instance_id.clone()));
    }
    Ok(premise)
}

fn sentences(output: &SystemOutput) -> Result<Vec<&str>, MetricError> {
    let sentences = output.sentence_texts();
    if sentences.is_empty() {
        return Err(MetricError::EmptyOutput(output.instance_id.clone(), output.system_id.clone()));
    }
    Ok(sentences)
}

fn request_id(output_ref: (&str, &str), tag: &str, index: usize) -> String {
    format!("{}:{}:{tag}:{index}", output_ref.0, output_ref.1)
}

/// Mean entailment of each output sentence by the concatenated highlights.
pub async fn faithfulness_score(
    output: &SystemOutput,
    instance: &FicInstance,
    scorer: &dyn Scorer,
) -> Result<UnitScores, MetricError> {
    let premise = premise(instance)?;
    let requests = sentences(output)?
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            ScorerRequest::new(ScorerKind::Entailment, premise.clone(), s, request_id((&output.instance_id, &output.system_id), "faith", i))
        })
        .collect();
    run(scorer, "sentence", requests).await
}

/// Mean containment of each output sentence in the concatenated highlights.
pub async fn trained_faithfulness_score(
    output: &SystemOutput,
    instance: &FicInstance,
    scorer: &dyn Scorer,
) -> Result<UnitScores, MetricError> {
    let context = premise(instance)?;
    let requests = sentences(output)?
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            ScorerRequest::new(ScorerKind::Containment, context.clone(), s, request_id((&output.instance_id, &output.system_id), "tfaith", i))
        })
        .collect();
    run(scorer, "sentence", requests).await
}

/// Mean per-highlight coverage of `passage`.
pub async fn coverage_score(
    passage: &str,
    instance: &FicInstance,
    scorer: &dyn Scorer,
    mode: CoverageMode,
) -> Result<UnitScores, MetricError> {
    let highlight_texts: Vec<String> = instance
        .highlights
        .iter()
        .filter_map(|h| instance.review(&h.review_id).map(|r| h.text(r)))
        .filter(|t| !t.trim().is_empty())
        .collect();
    if highlight_texts.is_empty() {
        return Err(MetricError::EmptyHighlights(instance.instance_id.clone()));
    }
    let kind = match mode {
        CoverageMode::Trained => ScorerKind::Containment,
        CoverageMode::Nli => ScorerKind::Entailment,
    };
    let requests = highlight_texts
        .into_iter()
        .enumerate()
        .map(|(i, h)| ScorerRequest::new(kind, passage, h, format!("{}:cov:{i}", instance.instance_id)))
        .collect();
    run(scorer, "highlight", requests).await
}
