//! From collected alignments to benchmark instances, statistics, model
//! inputs and classifier training data.

mod assemble;
mod coverage_data;
mod encoding;
mod prompt;
mod stats;

use thiserror::Error;

pub use assemble::{assemble_instances, assign_splits, AssemblyWarning, Corpus, PairAlignment, SplitPlan, SplitRatios};
pub use coverage_data::{generate_coverage_training_data, CoverageData, CoverageLabel, CoverageRecord, CoverageSample, Provenance};
pub use encoding::{decode_markup, highlight_extents, render_input, review_offsets, DecodedMarkup, EncodedInput, EncodingConfig, EncodingMode};
pub use prompt::{build_kshot_prompt, build_kshot_prompt_with, default_instruction};
pub use stats::{compute_statistics, StatsRow, StatsTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("invalid alignment {0}")]
    InvalidAlignment(String),
    #[error("no split assigned to review set `{0}`")]
    MissingSplit(String),
    #[error("invalid split ratios {0}")]
    InvalidRatios(String),
    #[error("no instances")]
    EmptyInput,
    #[error("instance `{instance_id}` has {sentences} summary sentence(s); at least 2 needed")]
    TooFewSentences { instance_id: String, sentences: usize },
    #[error("instance `{0}` has no alignments")]
    NoAlignments(String),
    #[error("review `{0}` contains a highlight marker")]
    MarkerCollision(String),
    #[error("unbalanced highlight markers at character {offset}")]
    UnbalancedMarkers { offset: usize },
    #[error("nested highlight markers at character {offset}")]
    NestedMarkers { offset: usize },
    #[error("{requested} exemplars requested, {available} available")]
    NotEnoughExemplars { requested: usize, available: usize },
}
