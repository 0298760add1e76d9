//! Synthetic training data for the highlight-containment classifier.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::corpus::FicInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageLabel {
    Yes,
    No,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub instance_id: String,
    pub highlight_index: usize,
    pub removed_sentences: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageSample {
    pub highlight_text: String,
    pub modified_summary: String,
    pub label: CoverageLabel,
    pub provenance: Provenance,
}

/// Line format of the emitted NDJSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageRecord {
    pub highlight: String,
    pub summary: String,
    pub label: CoverageLabel,
}

impl CoverageSample {
    pub fn record(&self) -> CoverageRecord {
        CoverageRecord {
            highlight: self.highlight_text.clone(),
            summary: self.modified_summary.clone(),
            label: self.label,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoverageData {
    pub samples: Vec<CoverageSample>,
    pub warnings: Vec<String>,
}

fn summary_without(instance: &FicInstance, removed: &BTreeSet<usize>) -> String {
    (0..instance.fused_text.sentences.len())
        .filter(|i| !removed.contains(i))
        .filter_map(|i| instance.fused_text.sentence_text(i))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Per highlight: a negative sample whose summary drops every sentence the
/// highlight is aligned to, and a positive one dropping a single seeded-random
/// sentence it is not aligned to. The positive is skipped, with a warning,
/// when the highlight aligns to every sentence.
pub fn generate_coverage_training_data(instance: &FicInstance, seed: u64) -> Result<CoverageData, DatasetError> {
    let n = instance.fused_text.sentences.len();
    if n < 2 {
        return Err(DatasetError::TooFewSentences { instance_id: instance.instance_id.clone(), sentences: n });
    }
    if instance.alignments.is_empty() {
        return Err(DatasetError::NoAlignments(instance.instance_id.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = CoverageData::default();
    for (h, merged) in instance.merged_highlights().into_iter().enumerate() {
        let review = instance
            .review(&merged.highlight.review_id)
            .ok_or_else(|| DatasetError::DanglingReference(merged.highlight.review_id.clone()))?;
        let highlight_text = merged.highlight.text(review);
        let aligned = merged.aligned_sentences;

        data.samples.push(CoverageSample {
            highlight_text: highlight_text.clone(),
            modified_summary: summary_without(instance, &aligned),
            label: CoverageLabel::No,
            provenance: Provenance {
                instance_id: instance.instance_id.clone(),
                highlight_index: h,
                removed_sentences: aligned.iter().copied().collect(),
            },
        });

        let candidates: Vec<usize> = (0..n).filter(|i| !aligned.contains(i)).collect();
        if candidates.is_empty() {
            data.warnings.push(format!(
                "{}: highlight {h} aligns to every summary sentence; positive sample skipped",
                instance.instance_id
            ));
            continue;
        }
        let removed = candidates[rng.random_range(0..candidates.len())];
        data.samples.push(CoverageSample {
            highlight_text,
            modified_summary: summary_without(instance, &BTreeSet::from([removed])),
            label: CoverageLabel::Yes,
            provenance: Provenance {
                instance_id: instance.instance_id.clone(),
                highlight_index: h,
                removed_sentences: vec![removed],
            },
        });
    }
    Ok(data)
}
