//! Scoring: lexical overlap, highlight faithfulness and coverage, F-1
//! aggregation and annotator agreement.

mod agreement;
mod f1;
mod lexical;
mod nli;
mod report;

use thiserror::Error;

use crate::gateway::GatewayError;

pub use agreement::{aligned_token_sets, cohens_kappa, iou_agreement, iou_agreement_with, pairwise_iou, IouAggregation, IouAgreement};
pub use f1::{harmonic_f1, harmonic_mean, round1};
pub use lexical::{lcs_len, lexical_tokens, meteor_alignment, meteor_lite, rouge_l, rouge_n, MetricScore};
pub use nli::{coverage_score, faithfulness_score, trained_faithfulness_score, CoverageMode, FaithfulnessMode, UnitScores};
pub use report::{evaluate_output, evaluate_outputs, render_results_table, EvalConfig, LexicalMetric, ScoreReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("instance `{0}` has no highlights")]
    EmptyHighlights(String),
    #[error("output for instance `{0}` by `{1}` has no sentences")]
    EmptyOutput(String, String),
    #[error("scorer failed on {unit} {index}: {source}")]
    Gateway {
        unit: &'static str,
        index: usize,
        #[source]
        source: GatewayError,
    },
    #[error("instance mismatch: {0}")]
    InstanceMismatch(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{metric}: {source}")]
    Tagged {
        metric: &'static str,
        #[source]
        source: Box<MetricError>,
    },
}

impl MetricError {
    fn tagged(self, metric: &'static str) -> Self {
        MetricError::Tagged { metric, source: Box::new(self) }
    }
}
