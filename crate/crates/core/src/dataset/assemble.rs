use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::corpus::interchange::pair_instance_id;
use crate::corpus::{validate_alignment, Alignment, FicInstance, ReviewSet, Split, Summary};

/// Review sets and the summaries written for them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub review_sets: BTreeMap<String, ReviewSet>,
    /// Keyed by `(review_set_id, summary_id)`.
    pub summaries: BTreeMap<(String, String), Summary>,
}

impl Corpus {
    /// Collects the review-set/summary pairs of existing instances; their
    /// alignments are ignored.
    pub fn from_instances<'a>(instances: impl IntoIterator<Item = &'a FicInstance>) -> Self {
        let mut corpus = Corpus::default();
        for inst in instances {
            corpus.review_sets.entry(inst.review_set.id.clone()).or_insert_with(|| inst.review_set.clone());
            corpus
                .summaries
                .insert((inst.review_set.id.clone(), inst.fused_text.id.clone()), inst.fused_text.clone());
        }
        corpus
    }

    pub fn pair(&self, review_set_id: &str, summary_id: &str) -> Option<(&ReviewSet, &Summary)> {
        let rs = self.review_sets.get(review_set_id)?;
        let summary = self.summaries.get(&(review_set_id.to_string(), summary_id.to_string()))?;
        Some((rs, summary))
    }
}

/// An alignment together with the pair it was annotated on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAlignment {
    pub review_set_id: String,
    pub summary_id: String,
    pub alignment: Alignment,
}

/// Review-set id to split.
pub type SplitPlan = BTreeMap<String, Split>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyWarning {
    pub instance_id: String,
    pub message: String,
}

/// Builds one instance per review-set/summary pair of `corpus`.
pub fn assemble_instances(
    corpus: &Corpus,
    alignments: &[PairAlignment],
    plan: &SplitPlan,
) -> Result<(Vec<FicInstance>, Vec<AssemblyWarning>), DatasetError> {
    let mut by_pair: BTreeMap<(&str, &str), Vec<Alignment>> = BTreeMap::new();
    for pa in alignments {
        let (rs, summary) = corpus.pair(&pa.review_set_id, &pa.summary_id).ok_or_else(|| {
            DatasetError::DanglingReference(format!("alignment to unknown pair ({}, {})", pa.review_set_id, pa.summary_id))
        })?;
        let review = rs.review(&pa.alignment.highlight.review_id).ok_or_else(|| {
            DatasetError::DanglingReference(format!(
                "alignment to unknown review `{}` in set `{}`",
                pa.alignment.highlight.review_id, rs.id
            ))
        })?;
        let violations = validate_alignment(&pa.alignment, summary, Some(review), "alignment");
        if let Some(v) = violations.first() {
            return Err(DatasetError::InvalidAlignment(format!("({}, {}): {v}", pa.review_set_id, pa.summary_id)));
        }
        by_pair.entry((pa.review_set_id.as_str(), pa.summary_id.as_str())).or_default().push(pa.alignment.clone());
    }

    let mut instances = Vec::with_capacity(corpus.summaries.len());
    let mut warnings = Vec::new();
    for ((rs_id, summary_id), summary) in &corpus.summaries {
        let review_set = corpus
            .review_sets
            .get(rs_id)
            .ok_or_else(|| DatasetError::DanglingReference(format!("summary `{summary_id}` of unknown set `{rs_id}`")))?;
        let split = *plan.get(rs_id).ok_or_else(|| DatasetError::MissingSplit(rs_id.clone()))?;
        let instance_id = pair_instance_id(rs_id, summary_id);
        let pair_alignments = by_pair.remove(&(rs_id.as_str(), summary_id.as_str())).unwrap_or_default();
        if pair_alignments.is_empty() {
            warnings.push(AssemblyWarning { instance_id: instance_id.clone(), message: "pair has no alignments".into() });
        }
        instances.push(FicInstance::new(instance_id, review_set.clone(), summary.clone(), pair_alignments, split));
    }
    Ok((instances, warnings))
}

/// Split ratios `(train, dev, test)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self, DatasetError> {
        let all = [train, dev, test];
        if all.iter().any(|r| !(0.0..=1.0).contains(r)) || ((train + dev + test) - 1.0).abs() > 1e-9 {
            return Err(DatasetError::InvalidRatios(format!("({train}, {dev}, {test}) must be in [0,1] and sum to 1")));
        }
        Ok(SplitRatios { train, dev, test })
    }
}

/// Assigns whole review sets to splits by a seeded shuffle.
///
/// Ids are sorted and deduplicated first, so the plan depends only on the id
/// set, the ratios and the seed. Train and dev counts are rounded; test takes
/// the rest.
pub fn assign_splits<S: AsRef<str>>(review_set_ids: &[S], ratios: SplitRatios, seed: u64) -> SplitPlan {
    let mut ids: Vec<&str> = review_set_ids.iter().map(AsRef::as_ref).collect::<BTreeSet<_>>().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let n = ids.len();
    let n_train = ((ratios.train * n as f64).round() as usize).min(n);
    let n_dev = ((ratios.dev * n as f64).round() as usize).min(n - n_train);
    ids.into_iter()
        .enumerate()
        .map(|(i, id)| {
            let split = if i < n_train {
                Split::Train
            } else if i < n_train + n_dev {
                Split::Dev
            } else {
                Split::Test
            };
            (id.to_string(), split)
        })
        .collect()
}
