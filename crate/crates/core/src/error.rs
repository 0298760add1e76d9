use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::annotation::AnnotationError;
use crate::dataset::DatasetError;
use crate::gateway::GatewayError;
use crate::leaderboard::LeaderboardError;
use crate::meta_eval::MetaEvalError;
use crate::metrics::MetricError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    MetaEval(#[from] MetaEvalError),
    #[error(transparent)]
    Leaderboard(#[from] LeaderboardError),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().to_path_buf(), source }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// Short machine-readable tag for structured error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Context { source, .. } => source.kind(),
            Error::Annotation(_) => "annotation",
            Error::Dataset(_) => "dataset",
            Error::Gateway(_) => "gateway",
            Error::Metric(_) => "metric",
            Error::MetaEval(_) => "meta_eval",
            Error::Leaderboard(_) => "leaderboard",
            Error::Invalid(_) => "invalid",
        }
    }
}
