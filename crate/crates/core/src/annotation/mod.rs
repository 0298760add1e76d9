//! Annotation workflow: sessions, emboldening, alignment persistence,
//! qualification rounds, audit sampling and Likert judgments.

mod judgments;
mod qualification;
pub mod server;
mod session;
mod store;

use thiserror::Error;

pub use judgments::{Axis, JudgmentAggregate, JudgmentRecord, OutputRef};
pub use qualification::{
    FeedbackRecord, QualificationError, QualificationState, RoundResult, Stage, WorkerProfile, DEFAULT_CLOSED_ROUNDS, OPEN_ROUNDS,
};
pub use session::{
    embolden, AlignmentDraft, AnnotationSession, SaveOutcome, SaveStatus, SavedAlignment, SessionReview, SessionStatus, Step,
    SubmissionReceipt,
};
pub use store::{AnnotationStore, CatalogPair, PairPurpose, StoreConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnotationError {
    #[error("unknown worker `{0}`")]
    UnknownWorker(String),
    #[error("worker `{0}` already registered")]
    WorkerExists(String),
    #[error("worker `{worker_id}` at stage {stage} may not take this assignment")]
    UnqualifiedWorker { worker_id: String, stage: Stage },
    #[error("pair `{pair_id}` is assigned to worker `{worker_id}`")]
    PairAlreadyAssigned { pair_id: String, worker_id: String },
    #[error("unknown pair `{0}`")]
    UnknownPair(String),
    #[error("pair `{0}` already registered with different content")]
    PairConflict(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("session `{0}` is closed")]
    SessionClosed(String),
    #[error("session `{0}` has not been submitted")]
    NotSubmitted(String),
    #[error("span out of bounds: {0}")]
    SpanOutOfBounds(String),
    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),
    #[error("alignment is for sentence {requested} but sentence {focused} is focused")]
    WrongFocusedSentence { focused: usize, requested: usize },
    #[error("unknown review `{0}`")]
    UnknownReview(String),
    #[error("unknown alignment {0}")]
    UnknownAlignment(u64),
    #[error("{what} index {index} out of range ({len} available)")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    #[error("sampling rate {0} outside [0, 1]")]
    InvalidRate(f64),
    #[error(transparent)]
    Qualification(#[from] QualificationError),
    #[error("worker `{worker_id}` already has feedback for round {round}")]
    DuplicateFeedback { worker_id: String, round: String },
    #[error("{axis} score {score} out of range")]
    ScoreOutOfRange { axis: Axis, score: i64 },
    #[error("unknown output {}/{}", .0.instance_id, .0.system_id)]
    UnknownOutput(OutputRef),
    #[error("no {axis} judgments for {}/{}", output_ref.instance_id, output_ref.system_id)]
    NoJudgments { output_ref: OutputRef, axis: Axis },
}

impl AnnotationError {
    /// Variant name, used as the error code in HTTP responses.
    pub fn code(&self) -> &'static str {
        match self {
            AnnotationError::UnknownWorker(_) => "UnknownWorker",
            AnnotationError::WorkerExists(_) => "WorkerExists",
            AnnotationError::UnqualifiedWorker { .. } => "UnqualifiedWorker",
            AnnotationError::PairAlreadyAssigned { .. } => "PairAlreadyAssigned",
            AnnotationError::UnknownPair(_) => "UnknownPair",
            AnnotationError::PairConflict(_) => "PairConflict",
            AnnotationError::UnknownSession(_) => "UnknownSession",
            AnnotationError::SessionClosed(_) => "SessionClosed",
            AnnotationError::NotSubmitted(_) => "NotSubmitted",
            AnnotationError::SpanOutOfBounds(_) => "SpanOutOfBounds",
            AnnotationError::InvalidAlignment(_) => "InvalidAlignment",
            AnnotationError::WrongFocusedSentence { .. } => "WrongFocusedSentence",
            AnnotationError::UnknownReview(_) => "UnknownReview",
            AnnotationError::UnknownAlignment(_) => "UnknownAlignment",
            AnnotationError::IndexOutOfRange { .. } => "IndexOutOfRange",
            AnnotationError::InvalidRate(_) => "InvalidRate",
            AnnotationError::Qualification(QualificationError::TerminalState(_)) => "TerminalState",
            AnnotationError::Qualification(QualificationError::BlockedPendingTutorial) => "BlockedPendingTutorial",
            AnnotationError::DuplicateFeedback { .. } => "DuplicateFeedback",
            AnnotationError::ScoreOutOfRange { .. } => "ScoreOutOfRange",
            AnnotationError::UnknownOutput(_) => "UnknownOutput",
            AnnotationError::NoJudgments { .. } => "NoJudgments",
        }
    }
}
