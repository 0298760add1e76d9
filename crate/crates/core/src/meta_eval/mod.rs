//! Meta-evaluation of metrics against human judgments: rank correlations,
//! bootstrap confidence intervals and correlation tables.

mod bootstrap;
mod correlation;
mod table;

use thiserror::Error;

pub use bootstrap::{
    bootstrap_correlation, percentile, resample_indices, BootstrapConfig, CorrelationMethod, CorrelationResult, PairedSeries,
};
pub use correlation::{
    has_variance, kendall_tau, kendall_tau_a, kendall_tau_b, mid_ranks, pair_counts, pearson, spearman, spearman_rho, PairCounts,
    Rho, TauVariant,
};
pub use table::{correlation_table, CorrelationRow, CorrelationTable, ScoreRecord, TableCell, TableConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetaEvalError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least 2 paired values, got {0}")]
    TooShort(usize),
    #[error("series has zero variance")]
    DegenerateSeries,
    #[error("metric `{metric}` has no score for ({instance_id}, {system_id})")]
    MissingSeries { metric: String, instance_id: String, system_id: String },
    #[error("duplicate score record {0}")]
    DuplicateRecord(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
