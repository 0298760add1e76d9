//! Staged annotator recruitment: open rounds, a tutorial, closed rounds.

use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub const OPEN_ROUNDS: u8 = 3;
pub const DEFAULT_CLOSED_ROUNDS: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    OpenRound(u8),
    ClosedRound(u8),
    Qualified,
    Rejected,
}

impl Stage {
    pub fn is_terminal(self) -> bool {
        matches!(self, Stage::Qualified | Stage::Rejected)
    }

    /// Position in the linear progression; used to check that no stage is skipped.
    pub fn ordinal(self, closed_rounds: u8) -> u8 {
        match self {
            Stage::OpenRound(k) => k,
            Stage::ClosedRound(k) => OPEN_ROUNDS + k,
            Stage::Qualified => OPEN_ROUNDS + closed_rounds + 1,
            Stage::Rejected => u8::MAX,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::OpenRound(k) => write!(f, "open-{k}"),
            Stage::ClosedRound(k) => write!(f, "closed-{k}"),
            Stage::Qualified => f.write_str("qualified"),
            Stage::Rejected => f.write_str("rejected"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundResult {
    Passed,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualificationState {
    pub stage: Stage,
    pub tutorial_completed: bool,
    /// The last open round was passed but the tutorial is still outstanding.
    #[serde(default)]
    pub blocked_pending_tutorial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum QualificationError {
    #[error("worker is already {0}")]
    TerminalState(Stage),
    #[error("worker passed the open rounds and must complete the tutorial first")]
    BlockedPendingTutorial,
}

impl Default for QualificationState {
    fn default() -> Self {
        QualificationState { stage: Stage::OpenRound(1), tutorial_completed: false, blocked_pending_tutorial: false }
    }
}

impl QualificationState {
    pub fn advance(self, result: RoundResult, closed_rounds: u8) -> Result<Self, QualificationError> {
        if self.stage.is_terminal() {
            return Err(QualificationError::TerminalState(self.stage));
        }
        if self.blocked_pending_tutorial {
            return Err(QualificationError::BlockedPendingTutorial);
        }
        if result == RoundResult::Failed {
            return Ok(QualificationState { stage: Stage::Rejected, ..self });
        }
        let next = match self.stage {
            Stage::OpenRound(k) if k < OPEN_ROUNDS => Stage::OpenRound(k + 1),
            Stage::OpenRound(_) if !self.tutorial_completed => {
                return Ok(QualificationState { blocked_pending_tutorial: true, ..self });
            }
            Stage::OpenRound(_) => Stage::ClosedRound(1),
            Stage::ClosedRound(k) if k < closed_rounds => Stage::ClosedRound(k + 1),
            Stage::ClosedRound(_) => Stage::Qualified,
            terminal => terminal,
        };
        Ok(QualificationState { stage: next, ..self })
    }

    /// Marks the tutorial as watched, releasing a worker blocked after the
    /// last open round into the first closed round.
    pub fn complete_tutorial(self) -> Result<Self, QualificationError> {
        if self.stage.is_terminal() {
            return Err(QualificationError::TerminalState(self.stage));
        }
        if self.blocked_pending_tutorial {
            return Ok(QualificationState {
                stage: Stage::ClosedRound(1),
                tutorial_completed: true,
                blocked_pending_tutorial: false,
            });
        }
        Ok(QualificationState { tutorial_completed: true, ..self })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    /// Stage tag of the round, such as `open-2`.
    pub round: String,
    pub reviewer_note: String,
    pub passed: bool,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerProfile {
    pub worker_id: String,
    pub qualification: QualificationState,
    pub feedback: Vec<FeedbackRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use RoundResult::*;

    #[test]
    fn open_round_progression() {
        let s = QualificationState::default().advance(Passed, 3).unwrap();
        assert_eq!(s.stage, Stage::OpenRound(2));
    }

    #[test]
    fn tutorial_gate() {
        let mut s = QualificationState::default();
        for _ in 0..3 {
            s = s.advance(Passed, 3).unwrap();
        }
        assert_eq!(s.stage, Stage::OpenRound(3));
        assert!(s.blocked_pending_tutorial);
        assert_eq!(s.advance(Passed, 3), Err(QualificationError::BlockedPendingTutorial));
        let s = s.complete_tutorial().unwrap();
        assert_eq!(s.stage, Stage::ClosedRound(1));
        assert!(s.tutorial_completed && !s.blocked_pending_tutorial);
    }

    #[test]
    fn tutorial_first_then_straight_through() {
        let mut s = QualificationState::default().complete_tutorial().unwrap();
        let mut seen = vec![s.stage];
        while !s.stage.is_terminal() {
            s = s.advance(Passed, 3).unwrap();
            seen.push(s.stage);
        }
        assert_eq!(
            seen,
            [
                Stage::OpenRound(1),
                Stage::OpenRound(2),
                Stage::OpenRound(3),
                Stage::ClosedRound(1),
                Stage::ClosedRound(2),
                Stage::ClosedRound(3),
                Stage::Qualified
            ]
        );
        assert_eq!(s.advance(Passed, 3), Err(QualificationError::TerminalState(Stage::Qualified)));
    }

    #[test]
    fn failure_rejects_and_is_terminal() {
        let s = QualificationState::default().advance(Failed, 3).unwrap();
        assert_eq!(s.stage, Stage::Rejected);
        assert!(s.advance(Passed, 3).is_err());
        assert!(s.complete_tutorial().is_err());
    }

    #[test]
    fn configurable_closed_rounds() {
        let s = QualificationState { stage: Stage::ClosedRound(1), tutorial_completed: true, blocked_pending_tutorial: false };
        assert_eq!(s.advance(Passed, 1).unwrap().stage, Stage::Qualified);
        assert_eq!(s.advance(Passed, 2).unwrap().stage, Stage::ClosedRound(2));
    }

    #[test]
    fn stage_serde() {
        assert_eq!(serde_json::to_string(&Stage::OpenRound(2)).unwrap(), r#"{"OpenRound":2}"#);
        assert_eq!(serde_json::to_string(&Stage::Qualified).unwrap(), r#""Qualified""#);
        assert_eq!(Stage::ClosedRound(1).to_string(), "closed-1");
    }
}
