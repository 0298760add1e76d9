//! ROUGE-N, ROUGE-L and a synonym-free METEOR.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{stem, tokenize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<f64>,
    pub value: f64,
}

impl MetricScore {
    fn from_pr(name: impl Into<String>, recall: f64, precision: f64) -> Self {
        let f1 = harmonic(recall, precision);
        MetricScore { name: name.into(), recall: Some(recall), precision: Some(precision), f1: Some(f1), value: f1 }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Lowercased word tokens of `text`; punctuation is dropped.
pub fn lexical_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| t.text.chars().any(char::is_alphanumeric))
        .map(|t| t.text.to_lowercase())
        .collect()
}

fn lower<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    tokens.iter().map(|t| t.as_ref().to_lowercase()).collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram overlap. `n` must be at least 1.
pub fn rouge_n<S: AsRef<str>>(reference: &[S], candidate: &[S], n: usize) -> MetricScore {
    assert!(n >= 1, "ROUGE-N needs n >= 1");
    let (reference, candidate) = (lower(reference), lower(candidate));
    let ref_counts = ngram_counts(&reference, n);
    let cand_counts = ngram_counts(&candidate, n);
    let overlap: usize = cand_counts
        .iter()
        .map(|(gram, c)| ref_counts.get(gram).map_or(0, |r| (*r).min(*c)))
        .sum();
    let ref_total: usize = ref_counts.values().sum();
    let cand_total: usize = cand_counts.values().sum();
    MetricScore::from_pr(format!("rouge{n}"), ratio(overlap, ref_total), ratio(overlap, cand_total))
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn rouge_l<S: AsRef<str>>(reference: &[S], candidate: &[S]) -> MetricScore {
    let (reference, candidate) = (lower(reference), lower(candidate));
    let lcs = lcs_len(&reference, &candidate);
    MetricScore::from_pr("rougeL", ratio(lcs, reference.len()), ratio(lcs, candidate.len()))
}

/// Unigram alignment used by [`meteor_lite`]: `(candidate position, reference position)`
/// pairs sorted by candidate position.
pub fn meteor_alignment<S: AsRef<str>>(reference: &[S], candidate: &[S]) -> Vec<(usize, usize)> {
    let (reference, candidate) = (lower(reference), lower(candidate));
    let mut ref_used = vec![false; reference.len()];
    let mut cand_used = vec![false; candidate.len()];
    let mut pairs = Vec::new();
    let ref_stems: Vec<String> = reference.iter().map(|t| stem(t)).collect();
    let stages: [&dyn Fn(usize, usize) -> bool; 2] = [
        &|c, r| candidate[c] == reference[r],
        &|c, r| stem(&candidate[c]) == ref_stems[r],
    ];
    for matches in stages {
        for c in 0..candidate.len() {
            if cand_used[c] {
                continue;
            }
            if let Some(r) = (0..reference.len()).find(|&r| !ref_used[r] && matches(c, r)) {
                ref_used[r] = true;
                cand_used[c] = true;
                pairs.push((c, r));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// METEOR with exact then stem matching and no synonym stage.
///
/// `Fmean = 10PR / (R + 9P)`, `penalty = 0.5 (chunks / matches)^3`,
/// `score = Fmean (1 - penalty)`.
pub fn meteor_lite<S: AsRef<str>>(reference: &[S], candidate: &[S]) -> MetricScore {
    let pairs = meteor_alignment(reference, candidate);
    let matches = pairs.len();
    let precision = ratio(matches, candidate.len());
    let recall = ratio(matches, reference.len());
    if matches == 0 {
        return MetricScore { name: "meteor_lite".into(), recall: Some(0.0), precision: Some(0.0), f1: Some(0.0), value: 0.0 };
    }
    let chunks = 1 + pairs.windows(2).filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1)).count();
    let fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
    let penalty = 0.5 * (chunks as f64 / matches as f64).powi(3);
    MetricScore {
        name: "meteor_lite".into(),
        recall: Some(recall),
        precision: Some(precision),
        f1: Some(harmonic(recall, precision)),
        value: fmean * (1.0 - penalty),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn rouge_examples() {
        let s = rouge_n(&toks("the cat sat"), &toks("the cat sat"), 1);
        assert_eq!((s.recall, s.precision, s.f1), (Some(1.0), Some(1.0), Some(1.0)));
        let s = rouge_n(&toks("the cat sat"), &toks("the cat"), 1);
        assert_eq!(s.recall, Some(2.0 / 3.0));
        assert_eq!(s.precision, Some(1.0));
        let s = rouge_n(&toks("a b c d"), &toks("a b c"), 2);
        assert_eq!(s.recall, Some(2.0 / 3.0));
        assert_eq!(s.precision, Some(1.0));
    }

    #[test]
    fn rouge_clipping_and_case() {
        let s = rouge_n(&toks("The the cat"), &toks("the the the"), 1);
        assert_eq!(s.recall, Some(2.0 / 3.0));
        assert_eq!(s.precision, Some(2.0 / 3.0));
    }

    #[test]
    fn zero_denominators_score_zero() {
        let empty: Vec<&str> = vec![];
        let s = rouge_n(&toks("a"), &toks("a"), 2);
        assert_eq!(s.value, 0.0);
        let s = rouge_l(&empty, &empty);
        assert_eq!((s.recall, s.precision, s.value), (Some(0.0), Some(0.0), 0.0));
    }

    #[test]
    fn rouge_l_examples() {
        let s = rouge_l(&toks("a b c d"), &toks("a c d b"));
        assert_eq!((s.recall, s.precision), (Some(0.75), Some(0.75)));
        let s = rouge_l(&toks("a b"), &toks("c d"));
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn meteor_identical_and_reversed() {
        let identical = meteor_lite(&toks("pool was great"), &toks("pool was great"));
        let expected = 1.0 * (1.0 - 0.5 * (1.0f64 / 3.0).powi(3));
        assert!((identical.value - expected).abs() < 1e-12);
        let reversed = meteor_lite(&toks("pool was great"), &toks("great was pool"));
        assert!((reversed.value - 0.5).abs() < 1e-12);
        assert!(reversed.value < identical.value);
        assert_eq!(meteor_lite(&toks("a b"), &toks("c d")).value, 0.0);
    }

    #[test]
    fn meteor_stem_stage() {
        let pairs = meteor_alignment(&toks("rooms cleaned"), &toks("room clean"));
        assert_eq!(pairs, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn lexical_tokens_drop_punctuation() {
        assert_eq!(lexical_tokens("Great pool!"), vec!["great", "pool"]);
    }
}
