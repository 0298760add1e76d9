//! Flat-file leaderboard: scores submissions over the test split and ranks them.

pub mod server;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Mutex;

use axum::http::StatusCode;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{AnnotationStore, Axis};
use crate::corpus::{FicInstance, Split, SystemOutput};
use crate::error::Result;
use crate::gateway::Scorer;
use crate::journal::Journal;
use crate::metrics::{evaluate_outputs, harmonic_mean, round1, EvalConfig};
use crate::table::TextTable;

const JOURNAL_NAME: &str = "leaderboard";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LeaderboardError {
    #[error("submission does not cover instance(s): {}", .0.join(", "))]
    IncompleteCoverageOfInstances(Vec<String>),
    #[error("instance `{0}` appears more than once in the submission")]
    DuplicateOutput(String),
    #[error("instance `{0}` is not in the test split")]
    UnknownInstance(String),
    #[error("system `{0}` is already on the leaderboard")]
    DuplicateSystemId(String),
    #[error("system id must not be empty")]
    EmptySystemId,
    #[error("no test-split instances to score against")]
    NoTestInstances,
    #[error("submission line {line}: {message}")]
    MalformedSubmission { line: usize, message: String },
}

impl LeaderboardError {
    pub fn code(&self) -> &'static str {
        match self {
            LeaderboardError::IncompleteCoverageOfInstances(_) => "IncompleteCoverageOfInstances",
            LeaderboardError::DuplicateOutput(_) => "DuplicateOutput",
            LeaderboardError::UnknownInstance(_) => "UnknownInstance",
            LeaderboardError::DuplicateSystemId(_) => "DuplicateSystemId",
            LeaderboardError::EmptySystemId => "EmptySystemId",
            LeaderboardError::NoTestInstances => "NoTestInstances",
            LeaderboardError::MalformedSubmission { .. } => "MalformedSubmission",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            LeaderboardError::DuplicateSystemId(_) => StatusCode::CONFLICT,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        }
    }
}

/// One line of a submission file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmissionLine {
    pub instance_id: String,
    pub passage: String,
}

/// Parses newline-delimited `{instance_id, passage}` records. Blank lines are
/// ignored.
pub fn parse_submission(text: &str) -> Result<Vec<SubmissionLine>, LeaderboardError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| LeaderboardError::MalformedSubmission { line: i + 1, message: e.to_string() })
        })
        .collect()
}

/// Mean scores over the test split, on the 0-100 scale at full precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateScores {
    pub faithfulness: f64,
    pub coverage: f64,
    /// Harmonic mean of the two means above.
    pub f1: f64,
}

impl AggregateScores {
    pub fn from_means(faithfulness: f64, coverage: f64) -> Self {
        AggregateScores { faithfulness, coverage, f1: harmonic_mean(faithfulness, coverage) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub system_id: String,
    pub outputs: Vec<SystemOutput>,
    pub submitted_at: DateTime<Utc>,
    pub scores: Option<AggregateScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub system_id: String,
    pub faithfulness: f64,
    pub coverage: f64,
    pub f1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub redundancy: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardTable {
    pub rows: Vec<LeaderboardRow>,
}

/// Descending F-1, then descending faithfulness, then system id.
pub fn rank_rows(rows: &mut [LeaderboardRow]) {
    rows.sort_by(|a, b| {
        b.f1.total_cmp(&a.f1)
            .then(b.faithfulness.total_cmp(&a.faithfulness))
            .then_with(|| a.system_id.cmp(&b.system_id))
    });
}

impl LeaderboardTable {
    pub fn from_submissions<'a>(submissions: impl IntoIterator<Item = &'a Submission>, judgments: Option<&AnnotationStore>) -> Self {
        let mut rows: Vec<LeaderboardRow> = submissions
            .into_iter()
            .filter_map(|s| {
                let scores = s.scores?;
                Some(LeaderboardRow {
                    system_id: s.system_id.clone(),
                    faithfulness: scores.faithfulness,
                    coverage: scores.coverage,
                    f1: scores.f1,
                    coherence: judgments.and_then(|j| j.system_axis_mean(&s.system_id, Axis::Coherence)),
                    redundancy: judgments.and_then(|j| j.system_axis_mean(&s.system_id, Axis::Redundancy)),
                })
            })
            .collect();
        rank_rows(&mut rows);
        LeaderboardTable { rows }
    }

    /// Aligned text table; scores rounded to one decimal here and only here.
    /// Judgment columns appear when any row has them.
    pub fn render_text(&self) -> String {
        let judged = self.rows.iter().any(|r| r.coherence.is_some() || r.redundancy.is_some());
        let mut headers = vec!["System", "Faithfulness", "Coverage", "F-1"];
        if judged {
            headers.extend(["Coherence", "Redundancy"]);
        }
        let mut table = TextTable::new(headers);
        for r in &self.rows {
            let mut cells = vec![
                r.system_id.clone(),
                format!("{:.1}", round1(r.faithfulness)),
                format!("{:.1}", round1(r.coverage)),
                format!("{:.1}", round1(r.f1)),
            ];
            if judged {
                let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
                cells.extend([fmt(r.coherence), fmt(r.redundancy)]);
            }
            table.push(cells);
        }
        table.render()
    }
}

/// Checks that `lines` cover every instance exactly once and turns them into
/// system outputs in instance order.
pub fn match_outputs(system_id: &str, lines: &[SubmissionLine], instances: &[&FicInstance]) -> Result<Vec<SystemOutput>, LeaderboardError> {
    let known: BTreeSet<&str> = instances.iter().map(|i| i.instance_id.as_str()).collect();
    let mut by_id: BTreeMap<&str, &str> = BTreeMap::new();
    for line in lines {
        if !known.contains(line.instance_id.as_str()) {
            return Err(LeaderboardError::UnknownInstance(line.instance_id.clone()));
        }
        if by_id.insert(&line.instance_id, &line.passage).is_some() {
            return Err(LeaderboardError::DuplicateOutput(line.instance_id.clone()));
        }
    }
    let missing: Vec<String> = known.iter().filter(|id| !by_id.contains_key(*id)).map(|id| id.to_string()).collect();
    if !missing.is_empty() {
        return Err(LeaderboardError::IncompleteCoverageOfInstances(missing));
    }
    Ok(instances.iter().map(|i| SystemOutput::new(i.instance_id.clone(), system_id, by_id[i.instance_id.as_str()])).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Event {
    /// Adds the submission, replacing any earlier one with the same system id.
    Recorded { submission: Submission },
}

struct Inner {
    submissions: Vec<Submission>,
    journal: Journal,
}

/// Journal-backed leaderboard store.
pub struct Leaderboard {
    inner: Mutex<Inner>,
}

impl Leaderboard {
    pub fn open(dir: &Path) -> Result<Self> {
        let (journal, replay) = Journal::open::<Vec<Submission>, Event>(dir, JOURNAL_NAME)?;
        let mut submissions = replay.snapshot.unwrap_or_default();
        for event in replay.events {
            apply(&mut submissions, event);
        }
        Ok(Leaderboard { inner: Mutex::new(Inner { submissions, journal }) })
    }

    pub fn submissions(&self) -> Vec<Submission> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).submissions.clone()
    }

    fn check_new(&self, system_id: &str, replace: bool) -> Result<(), LeaderboardError> {
        if system_id.trim().is_empty() {
            return Err(LeaderboardError::EmptySystemId);
        }
        let inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        if !replace && inner.submissions.iter().any(|s| s.system_id == system_id) {
            return Err(LeaderboardError::DuplicateSystemId(system_id.to_string()));
        }
        Ok(())
    }

    /// Scores a submission against the test split of `instances` and records
    /// it. Nothing is written unless every output scores successfully.
    pub async fn submit(
        &self,
        system_id: &str,
        lines: &[SubmissionLine],
        instances: &[FicInstance],
        scorer: &dyn Scorer,
        config: &EvalConfig,
        replace: bool,
    ) -> Result<Submission> {
        self.check_new(system_id, replace)?;
        let test: Vec<&FicInstance> = instances.iter().filter(|i| i.split == Split::Test).collect();
        if test.is_empty() {
            return Err(LeaderboardError::NoTestInstances.into());
        }
        let outputs = match_outputs(system_id, lines, &test)?;
        let test_owned: Vec<FicInstance> = test.into_iter().cloned().collect();
        let reports = evaluate_outputs(&test_owned, &outputs, scorer, config).await?;
        let n = reports.len() as f64;
        let faith = reports.iter().map(|r| r.faithfulness * 100.0).sum::<f64>() / n;
        let cov = reports.iter().map(|r| r.coverage * 100.0).sum::<f64>() / n;
        let submission = Submission {
            system_id: system_id.to_string(),
            outputs,
            submitted_at: Utc::now(),
            scores: Some(AggregateScores::from_means(faith, cov)),
        };

        let mut inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        // Re-check under the lock: another submission may have landed meanwhile.
        if !replace && inner.submissions.iter().any(|s| s.system_id == system_id) {
            return Err(LeaderboardError::DuplicateSystemId(system_id.to_string()).into());
        }
        let event = Event::Recorded { submission: submission.clone() };
        inner.journal.append(&event)?;
        apply(&mut inner.submissions, event);
        Ok(submission)
    }

    pub fn render(&self, judgments: Option<&AnnotationStore>) -> LeaderboardTable {
        let inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        LeaderboardTable::from_submissions(&inner.submissions, judgments)
    }
}

fn apply(submissions: &mut Vec<Submission>, event: Event) {
    match event {
        Event::Recorded { submission } => {
            submissions.retain(|s| s.system_id != submission.system_id);
            submissions.push(submission);
        }
    }
}
