use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::corpus::{FicInstance, Split};
use crate::table::TextTable;

/// Dataset statistics for one split (or all splits together).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub unique_review_sets: usize,
    pub mean_summaries_per_set: f64,
    pub pairs: usize,
    pub mean_review_tokens: f64,
    pub mean_summary_tokens: f64,
    pub mean_review_sentences: f64,
    pub mean_summary_sentences: f64,
    pub max_review_tokens: usize,
    pub max_review_set_tokens: usize,
    pub max_summary_tokens: usize,
    /// Percentage of summary sentences aligned to at least two reviews.
    pub pct_multi_review: f64,
    /// Percentage of summary sentences aligned, within a single review, to at
    /// least two of its sentences.
    pub pct_multi_sentence: f64,
    /// Mean over (instance, review) of the fraction of review tokens highlighted.
    pub mean_highlighted_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsTable {
    /// Keyed by `train`, `dev`, `test` (when present) and `overall`.
    pub rows: BTreeMap<String, StatsRow>,
}

fn mean(sum: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn row(instances: &[&FicInstance]) -> StatsRow {
    let mut sets: BTreeMap<&str, &FicInstance> = BTreeMap::new();
    for inst in instances {
        sets.entry(inst.review_set.id.as_str()).or_insert(inst);
    }
    let (mut review_tokens, mut review_sentences, mut n_reviews) = (0usize, 0usize, 0usize);
    let (mut max_review, mut max_set) = (0usize, 0usize);
    for inst in sets.values() {
        let mut set_tokens = 0;
        for review in &inst.review_set.reviews {
            review_tokens += review.tokens.len();
            review_sentences += review.sentences.len();
            n_reviews += 1;
            max_review = max_review.max(review.tokens.len());
            set_tokens += review.tokens.len();
        }
        max_set = max_set.max(set_tokens);
    }

    let (mut summary_tokens, mut summary_sentences, mut max_summary) = (0usize, 0usize, 0usize);
    let (mut multi_review, mut multi_sentence) = (0usize, 0usize);
    let (mut highlighted_sum, mut highlighted_n) = (0.0, 0usize);
    for inst in instances {
        let summary = &inst.fused_text;
        summary_tokens += summary.tokens.len();
        summary_sentences += summary.sentences.len();
        max_summary = max_summary.max(summary.tokens.len());

        // sentence -> review id -> review sentence indices touched
        let mut touched: HashMap<usize, HashMap<&str, BTreeSet<usize>>> = HashMap::new();
        for a in &inst.alignments {
            let Some(review) = inst.review(&a.highlight.review_id) else { continue };
            let per_review = touched.entry(a.summary_sentence_index).or_default().entry(review.id.as_str()).or_default();
            for span in &a.highlight.spans {
                per_review.extend(
                    review.sentences.iter().enumerate().filter(|(_, s)| s.intersects(span)).map(|(i, _)| i),
                );
            }
        }
        for per_review in touched.values() {
            if per_review.len() >= 2 {
                multi_review += 1;
            }
            if per_review.values().any(|s| s.len() >= 2) {
                multi_sentence += 1;
            }
        }

        for review in &inst.review_set.reviews {
            if review.tokens.is_empty() {
                continue;
            }
            let spans: Vec<_> = inst.highlights.iter().filter(|h| h.review_id == review.id).flat_map(|h| h.spans.iter()).collect();
            let covered = review.tokens.iter().filter(|t| spans.iter().any(|s| s.intersects(&t.span))).count();
            highlighted_sum += covered as f64 / review.tokens.len() as f64;
            highlighted_n += 1;
        }
    }

    let pairs = instances.len();
    StatsRow {
        unique_review_sets: sets.len(),
        mean_summaries_per_set: mean(pairs as f64, sets.len()),
        pairs,
        mean_review_tokens: mean(review_tokens as f64, n_reviews),
        mean_summary_tokens: mean(summary_tokens as f64, pairs),
        mean_review_sentences: mean(review_sentences as f64, n_reviews),
        mean_summary_sentences: mean(summary_sentences as f64, pairs),
        max_review_tokens: max_review,
        max_review_set_tokens: max_set,
        max_summary_tokens: max_summary,
        pct_multi_review: 100.0 * mean(multi_review as f64, summary_sentences),
        pct_multi_sentence: 100.0 * mean(multi_sentence as f64, summary_sentences),
        mean_highlighted_fraction: mean(highlighted_sum, highlighted_n),
    }
}

/// Computes per-split and overall statistics.
///
/// Review sizes are counted once per unique review set; summary sizes once per
/// pair. Percentages use every summary sentence as the denominator.
pub fn compute_statistics(instances: &[FicInstance]) -> Result<StatsTable, DatasetError> {
    if instances.is_empty() {
        return Err(DatasetError::EmptyInput);
    }
    let mut rows = BTreeMap::new();
    for split in Split::ALL {
        let subset: Vec<&FicInstance> = instances.iter().filter(|i| i.split == split).collect();
        if !subset.is_empty() {
            rows.insert(split.to_string(), row(&subset));
        }
    }
    rows.insert("overall".to_string(), row(&instances.iter().collect::<Vec<_>>()));
    Ok(StatsTable { rows })
}

impl StatsTable {
    pub fn overall(&self) -> &StatsRow {
        &self.rows["overall"]
    }

    /// Rows in `train, dev, test, overall` order.
    pub fn ordered(&self) -> Vec<(&str, &StatsRow)> {
        ["train", "dev", "test", "overall"]
            .into_iter()
            .filter_map(|k| self.rows.get_key_value(k).map(|(k, v)| (k.as_str(), v)))
            .collect()
    }

    pub fn render_text(&self) -> String {
        let mut table = TextTable::new([
            "",
            "#sets",
            "#summ/set",
            "#pairs",
            "mean tok rev/summ",
            "max tok rev/set/summ",
            "mean sent rev/summ",
            "multi-review",
            "multi-sentence",
            "highlighted",
        ]);
        for (name, r) in self.ordered() {
            let mut label = name.to_string();
            label[..1].make_ascii_uppercase();
            table.push([
                label,
                r.unique_review_sets.to_string(),
                format!("{:.2}", r.mean_summaries_per_set),
                r.pairs.to_string(),
                format!("{:.2}/{:.2}", r.mean_review_tokens, r.mean_summary_tokens),
                format!("{}/{}/{}", r.max_review_tokens, r.max_review_set_tokens, r.max_summary_tokens),
                format!("{:.2}/{:.2}", r.mean_review_sentences, r.mean_summary_sentences),
                format!("{:.2}%", r.pct_multi_review),
                format!("{:.2}%", r.pct_multi_sentence),
                format!("{:.2}", r.mean_highlighted_fraction),
            ]);
        }
        table.render()
    }
}
