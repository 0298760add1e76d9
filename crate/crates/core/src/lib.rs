//! Workbench for the highlight-fusion benchmark: corpus model, dataset
//! construction, annotation service, evaluation metrics, scorer gateway,
//! meta-evaluation and a leaderboard.

pub mod annotation;
pub mod cli;
pub mod corpus;
pub mod dataset;
mod error;
pub mod gateway;
pub mod journal;
pub mod leaderboard;
pub mod meta_eval;
pub mod metrics;
pub mod table;

pub use error::{Error, Result};
