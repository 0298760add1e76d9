//! Inter-annotator agreement: token IoU of aligned highlights and Cohen's kappa.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::corpus::{Alignment, FicInstance};

/// How per-sentence IoU values are combined into one score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IouAggregation {
    /// Uniform mean over sentences that either annotator aligned.
    #[default]
    SentenceMean,
    /// Total intersection over total union across those sentences.
    Pooled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IouAgreement {
    /// 0-100 scale.
    pub overall: f64,
    /// 0-100 per summary sentence; 100 where neither annotator aligned anything.
    pub per_sentence: Vec<f64>,
    /// Sentences where at least one annotator aligned something.
    pub counted: Vec<usize>,
}

type TokenKey = (String, usize);

/// Content-word tokens covered by each summary sentence's aligned highlights.
pub fn aligned_token_sets(alignments: &[Alignment], instance: &FicInstance) -> Result<Vec<BTreeSet<TokenKey>>, MetricError> {
    let n = instance.fused_text.sentences.len();
    let mut sets = vec![BTreeSet::new(); n];
    for alignment in alignments {
        let review = instance.review(&alignment.highlight.review_id).ok_or_else(|| {
            MetricError::InstanceMismatch(format!(
                "review `{}` not in instance `{}`",
                alignment.highlight.review_id, instance.instance_id
            ))
        })?;
        let set = sets.get_mut(alignment.summary_sentence_index).ok_or_else(|| {
            MetricError::InstanceMismatch(format!(
                "sentence {} out of range for instance `{}`",
                alignment.summary_sentence_index, instance.instance_id
            ))
        })?;
        for span in &alignment.highlight.spans {
            for i in review.tokens_in(*span) {
                if review.tokens[i].is_content_word {
                    set.insert((review.id.clone(), i));
                }
            }
        }
    }
    Ok(sets)
}

pub fn iou_agreement(a: &[Alignment], b: &[Alignment], instance: &FicInstance) -> Result<IouAgreement, MetricError> {
    iou_agreement_with(a, b, instance, IouAggregation::SentenceMean)
}

pub fn iou_agreement_with(
    a: &[Alignment],
    b: &[Alignment],
    instance: &FicInstance,
    aggregation: IouAggregation,
) -> Result<IouAgreement, MetricError> {
    let sets_a = aligned_token_sets(a, instance)?;
    let sets_b = aligned_token_sets(b, instance)?;
    let mut per_sentence = Vec::with_capacity(sets_a.len());
    let mut counted = Vec::new();
    let (mut inter_total, mut union_total) = (0usize, 0usize);
    for (i, (sa, sb)) in sets_a.iter().zip(&sets_b).enumerate() {
        let inter = sa.intersection(sb).count();
        let union = sa.len() + sb.len() - inter;
        if union == 0 {
            per_sentence.push(100.0);
        } else {
            per_sentence.push(100.0 * inter as f64 / union as f64);
            counted.push(i);
            inter_total += inter;
            union_total += union;
        }
    }
    let overall = if counted.is_empty() {
        100.0
    } else {
        match aggregation {
            IouAggregation::SentenceMean => counted.iter().map(|&i| per_sentence[i]).sum::<f64>() / counted.len() as f64,
            IouAggregation::Pooled => 100.0 * inter_total as f64 / union_total as f64,
        }
    };
    Ok(IouAgreement { overall, per_sentence, counted })
}

/// Mean IoU over every pair of annotators of the same instance.
pub fn pairwise_iou(annotations: &[Vec<Alignment>], instance: &FicInstance) -> Result<f64, MetricError> {
    let mut scores = Vec::new();
    for i in 0..annotations.len() {
        for j in (i + 1)..annotations.len() {
            scores.push(iou_agreement(&annotations[i], &annotations[j], instance)?.overall);
        }
    }
    if scores.is_empty() {
        return Err(MetricError::LengthMismatch { left: annotations.len(), right: 2 });
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Cohen's kappa with empirical marginals.
///
/// Returns 1.0 when chance agreement is 1 (both raters used one shared category).
pub fn cohens_kappa<T: Eq + Hash>(a: &[T], b: &[T]) -> Result<f64, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(MetricError::LengthMismatch { left: 0, right: 0 });
    }
    let n = a.len() as f64;
    let observed = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let mut marginals: HashMap<&T, (usize, usize)> = HashMap::new();
    for x in a {
        marginals.entry(x).or_default().0 += 1;
    }
    for y in b {
        marginals.entry(y).or_default().1 += 1;
    }
    let expected: f64 = marginals.values().map(|&(ca, cb)| (ca as f64 / n) * (cb as f64 / n)).sum();
    if (1.0 - expected).abs() < 1e-12 {
        return Ok(if observed >= 1.0 - 1e-12 { 1.0 } else { 0.0 });
    }
    Ok((observed - expected) / (1.0 - expected))
}
