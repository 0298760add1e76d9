//! Event-sourced annotation state persisted through the journal.
//!
//! Every mutation is validated against the current state, appended to the
//! journal as an event carrying its resulting values, and only then applied in
//! memory. Replay therefore rebuilds exactly the committed state, independent
//! of configuration changes between runs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::RwLock;

use chrono::Utc;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::judgments::{Axis, JudgmentAggregate, JudgmentRecord, OutputRef};
use super::qualification::{FeedbackRecord, QualificationState, RoundResult, Stage, WorkerProfile, DEFAULT_CLOSED_ROUNDS};
use super::session::{
    embolden, AlignmentDraft, AnnotationSession, SaveOutcome, SaveStatus, SavedAlignment, SessionReview, SessionStatus, Step,
    SubmissionReceipt,
};
use super::AnnotationError;
use crate::corpus::interchange::pair_instance_id;
use crate::corpus::{rules, validate_alignment, Alignment, ReviewSet, Summary};
use crate::dataset::PairAlignment;
use crate::error::{Error, Result};
use crate::journal::Journal;

const JOURNAL_NAME: &str = "annotation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairPurpose {
    /// Real annotation work; only qualified workers.
    Production,
    /// Training material for workers in qualification rounds.
    Qualification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogPair {
    pub review_set: ReviewSet,
    pub summary: Summary,
    pub purpose: PairPurpose,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreConfig {
    pub closed_rounds: u8,
    /// Compact the journal into a snapshot after this many events.
    pub snapshot_every: u64,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig { closed_rounds: DEFAULT_CLOSED_ROUNDS, snapshot_every: 1000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Event {
    WorkerRegistered { worker_id: String },
    QualificationChanged { worker_id: String, state: QualificationState, feedback: Option<FeedbackRecord> },
    PairRegistered { pair: CatalogPair },
    SessionStarted { session: AnnotationSession },
    AlignmentSaved { session_id: String, saved: SavedAlignment },
    AlignmentDeleted { session_id: String, alignment_id: u64 },
    SessionMoved { session_id: String, review_index: usize, sentence_index: usize, ready_to_submit: bool },
    SessionSubmitted { session_id: String },
    SessionReviewed { session_id: String, review: SessionReview },
    OutputRegistered { output: OutputRef },
    JudgmentRecorded { record: JudgmentRecord },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct State {
    workers: BTreeMap<String, WorkerProfile>,
    pairs: BTreeMap<String, CatalogPair>,
    /// Pair id to the worker it is assigned to.
    assignments: BTreeMap<String, String>,
    sessions: BTreeMap<String, AnnotationSession>,
    next_session: u64,
    next_alignment: u64,
    outputs: BTreeSet<OutputRef>,
    judgments: BTreeMap<String, JudgmentRecord>,
}

impl State {
    fn apply(&mut self, event: Event) {
        match event {
            Event::WorkerRegistered { worker_id } => {
                self.workers.insert(
                    worker_id.clone(),
                    WorkerProfile { worker_id, qualification: QualificationState::default(), feedback: Vec::new() },
                );
            }
            Event::QualificationChanged { worker_id, state, feedback } => {
                if let Some(w) = self.workers.get_mut(&worker_id) {
                    w.qualification = state;
                    w.feedback.extend(feedback);
                }
            }
            Event::PairRegistered { pair } => {
                let id = pair_instance_id(&pair.review_set.id, &pair.summary.id);
                self.pairs.insert(id, pair);
            }
            Event::SessionStarted { session } => {
                self.next_session += 1;
                self.assignments
                    .insert(pair_instance_id(&session.review_set_id, &session.summary_id), session.worker_id.clone());
                self.sessions.insert(session.session_id.clone(), session);
            }
            Event::AlignmentSaved { session_id, saved } => {
                self.next_alignment = self.next_alignment.max(saved.alignment_id + 1);
                if let Some(s) = self.sessions.get_mut(&session_id) {
                    s.saved_alignments.push(saved);
                }
            }
            Event::AlignmentDeleted { session_id, alignment_id } => {
                if let Some(s) = self.sessions.get_mut(&session_id) {
                    s.saved_alignments.retain(|a| a.alignment_id != alignment_id);
                }
            }
            Event::SessionMoved { session_id, review_index, sentence_index, ready_to_submit } => {
                if let Some(s) = self.sessions.get_mut(&session_id) {
                    s.current_review_index = review_index;
                    s.focused_sentence_index = sentence_index;
                    s.ready_to_submit = ready_to_submit;
                }
            }
            Event::SessionSubmitted { session_id } => {
                if let Some(s) = self.sessions.get_mut(&session_id) {
                    s.status = SessionStatus::Submitted;
                }
            }
            Event::SessionReviewed { session_id, review } => {
                if let Some(s) = self.sessions.get_mut(&session_id) {
                    s.status = SessionStatus::Reviewed;
                    s.review = Some(review);
                }
            }
            Event::OutputRegistered { output } => {
                self.outputs.insert(output);
            }
            Event::JudgmentRecorded { record } => {
                self.judgments.insert(record.id(), record);
            }
        }
    }

    fn worker(&self, id: &str) -> Result<&WorkerProfile, AnnotationError> {
        self.workers.get(id).ok_or_else(|| AnnotationError::UnknownWorker(id.to_string()))
    }

    fn session(&self, id: &str) -> Result<&AnnotationSession, AnnotationError> {
        self.sessions.get(id).ok_or_else(|| AnnotationError::UnknownSession(id.to_string()))
    }

    fn open_session(&self, id: &str) -> Result<&AnnotationSession, AnnotationError> {
        let s = self.session(id)?;
        if s.status != SessionStatus::Open {
            return Err(AnnotationError::SessionClosed(id.to_string()));
        }
        Ok(s)
    }

    fn pair_of(&self, session: &AnnotationSession) -> &CatalogPair {
        &self.pairs[&pair_instance_id(&session.review_set_id, &session.summary_id)]
    }

    /// Structural check of a persisted alignment against its pair.
    fn check_alignment(&self, session: &AnnotationSession, alignment: &Alignment) -> Result<(), AnnotationError> {
        let pair = self.pair_of(session);
        let review = pair
            .review_set
            .review(&alignment.highlight.review_id)
            .ok_or_else(|| AnnotationError::UnknownReview(alignment.highlight.review_id.clone()))?;
        let violations = validate_alignment(alignment, &pair.summary, Some(review), "alignment");
        if violations.is_empty() {
            return Ok(());
        }
        let detail = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        if violations.iter().any(|v| v.rule == rules::HIGHLIGHT_BOUNDS || v.rule == rules::SUMMARY_SPAN) {
            Err(AnnotationError::SpanOutOfBounds(detail))
        } else {
            Err(AnnotationError::InvalidAlignment(detail))
        }
    }
}

struct Inner {
    state: State,
    journal: Journal,
}

/// Thread-safe handle on the annotation store. Writes are serialized behind
/// one lock, so writes to a session are totally ordered; reads share the lock
/// and always see a committed state.
pub struct AnnotationStore {
    inner: RwLock<Inner>,
    config: StoreConfig,
}

impl AnnotationStore {
    pub fn open(dir: &Path, config: StoreConfig) -> Result<Self> {
        let (journal, replay) = Journal::open::<State, Event>(dir, JOURNAL_NAME)?;
        if replay.torn_tail {
            tracing::warn!(dir = %dir.display(), "dropped a partial trailing journal record");
        }
        let mut state = replay.snapshot.unwrap_or_default();
        for event in replay.events {
            state.apply(event);
        }
        for session in state.sessions.values() {
            for saved in &session.saved_alignments {
                state.check_alignment(session, &saved.alignment).map_err(|e| {
                    Error::from(e).context(format!("alignment {} of session {}", saved.alignment_id, session.session_id))
                })?;
            }
        }
        Ok(AnnotationStore { inner: RwLock::new(Inner { state, journal }), config })
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    fn read<T>(&self, f: impl FnOnce(&State) -> Result<T, AnnotationError>) -> Result<T> {
        let inner = self.inner.read().unwrap_or_else(|e| e.into_inner());
        Ok(f(&inner.state)?)
    }

    /// Runs `plan` against the current state; the events it returns are
    /// journaled and applied before the lock is released.
    fn write<T>(&self, plan: impl FnOnce(&State) -> Result<(Vec<Event>, T), AnnotationError>) -> Result<T> {
        let mut inner = self.inner.write().unwrap_or_else(|e| e.into_inner());
        let (events, out) = plan(&inner.state)?;
        for event in events {
            inner.journal.append(&event)?;
            inner.state.apply(event);
        }
        if inner.journal.since_snapshot() >= self.config.snapshot_every {
            let Inner { state, journal } = &mut *inner;
            journal.compact(state)?;
        }
        Ok(out)
    }

    /// Writes a snapshot and empties the journal.
    pub fn compact(&self) -> Result<()> {
        let mut inner = self.inner.write().unwrap_or_else(|e| e.into_inner());
        let Inner { state, journal } = &mut *inner;
        journal.compact(state)
    }

    pub fn register_worker(&self, worker_id: &str) -> Result<WorkerProfile> {
        self.write(|state| {
            if state.workers.contains_key(worker_id) {
                return Err(AnnotationError::WorkerExists(worker_id.to_string()));
            }
            let profile = WorkerProfile {
                worker_id: worker_id.to_string(),
                qualification: QualificationState::default(),
                feedback: Vec::new(),
            };
            Ok((vec![Event::WorkerRegistered { worker_id: worker_id.to_string() }], profile))
        })
    }

    pub fn worker(&self, worker_id: &str) -> Result<WorkerProfile> {
        self.read(|state| state.worker(worker_id).cloned())
    }

    pub fn advance_qualification(&self, worker_id: &str, result: RoundResult, note: &str) -> Result<QualificationState> {
        let closed_rounds = self.config.closed_rounds;
        self.write(|state| {
            let worker = state.worker(worker_id)?;
            let current = worker.qualification;
            let next = current.advance(result, closed_rounds)?;
            let round = current.stage.to_string();
            if worker.feedback.iter().any(|f| f.round == round) {
                return Err(AnnotationError::DuplicateFeedback { worker_id: worker_id.to_string(), round });
            }
            let feedback = FeedbackRecord {
                round,
                reviewer_note: note.to_string(),
                passed: result == RoundResult::Passed,
                timestamp: Utc::now(),
            };
            let event = Event::QualificationChanged { worker_id: worker_id.to_string(), state: next, feedback: Some(feedback) };
            Ok((vec![event], next))
        })
    }

    pub fn complete_tutorial(&self, worker_id: &str) -> Result<QualificationState> {
        self.write(|state| {
            let next = state.worker(worker_id)?.qualification.complete_tutorial()?;
            Ok((vec![Event::QualificationChanged { worker_id: worker_id.to_string(), state: next, feedback: None }], next))
        })
    }

    /// Adds a (review set, summary) pair to the catalog. Re-registering an
    /// identical pair is a no-op.
    pub fn register_pair(&self, review_set: ReviewSet, summary: Summary, purpose: PairPurpose) -> Result<String> {
        self.write(|state| {
            let id = pair_instance_id(&review_set.id, &summary.id);
            let pair = CatalogPair { review_set, summary, purpose };
            match state.pairs.get(&id) {
                Some(existing) if *existing == pair => Ok((vec![], id)),
                Some(_) => Err(AnnotationError::PairConflict(id)),
                None => Ok((vec![Event::PairRegistered { pair }], id)),
            }
        })
    }

    pub fn pair(&self, pair_id: &str) -> Result<CatalogPair> {
        self.read(|state| state.pairs.get(pair_id).cloned().ok_or_else(|| AnnotationError::UnknownPair(pair_id.to_string())))
    }

    /// Opens a session at review 0, sentence 0. A worker asking again for a
    /// pair they already hold gets their open session back.
    pub fn start_session(&self, worker_id: &str, review_set_id: &str, summary_id: &str) -> Result<AnnotationSession> {
        self.write(|state| {
            let pair_id = pair_instance_id(review_set_id, summary_id);
            let pair = state.pairs.get(&pair_id).ok_or_else(|| AnnotationError::UnknownPair(pair_id.clone()))?;
            let stage = state.worker(worker_id)?.qualification.stage;
            let allowed = match pair.purpose {
                PairPurpose::Production => stage == Stage::Qualified,
                PairPurpose::Qualification => stage != Stage::Rejected,
            };
            if !allowed {
                return Err(AnnotationError::UnqualifiedWorker { worker_id: worker_id.to_string(), stage });
            }
            if let Some(holder) = state.assignments.get(&pair_id) {
                if holder != worker_id {
                    return Err(AnnotationError::PairAlreadyAssigned { pair_id, worker_id: holder.clone() });
                }
                let open = state.sessions.values().find(|s| {
                    s.worker_id == worker_id
                        && s.review_set_id == review_set_id
                        && s.summary_id == summary_id
                        && s.status == SessionStatus::Open
                });
                if let Some(open) = open {
                    return Ok((vec![], open.clone()));
                }
            }
            let session = AnnotationSession {
                session_id: format!("s{:06}", state.next_session + 1),
                worker_id: worker_id.to_string(),
                review_set_id: review_set_id.to_string(),
                summary_id: summary_id.to_string(),
                current_review_index: 0,
                focused_sentence_index: 0,
                saved_alignments: Vec::new(),
                status: SessionStatus::Open,
                ready_to_submit: false,
                review: None,
            };
            Ok((vec![Event::SessionStarted { session: session.clone() }], session))
        })
    }

    pub fn session(&self, session_id: &str) -> Result<AnnotationSession> {
        self.read(|state| state.session(session_id).cloned())
    }

    pub fn sessions(&self) -> Vec<AnnotationSession> {
        let inner = self.inner.read().unwrap_or_else(|e| e.into_inner());
        inner.state.sessions.values().cloned().collect()
    }

    /// Token indices of review `review_index` to embolden for the focused sentence.
    pub fn embolden(&self, session_id: &str, review_index: usize) -> Result<Vec<usize>> {
        self.read(|state| {
            let session = state.open_session(session_id)?;
            let pair = state.pair_of(session);
            let reviews = &pair.review_set.reviews;
            let review = reviews.get(review_index).ok_or(AnnotationError::IndexOutOfRange {
                what: "review",
                index: review_index,
                len: reviews.len(),
            })?;
            embolden(&pair.summary, session.focused_sentence_index, review).ok_or(AnnotationError::IndexOutOfRange {
                what: "sentence",
                index: session.focused_sentence_index,
                len: pair.summary.sentences.len(),
            })
        })
    }

    pub fn save_alignment(&self, session_id: &str, draft: AlignmentDraft) -> Result<SaveOutcome> {
        self.write(|state| {
            let session = state.open_session(session_id)?;
            if draft.summary_sentence_index != session.focused_sentence_index {
                return Err(AnnotationError::WrongFocusedSentence {
                    focused: session.focused_sentence_index,
                    requested: draft.summary_sentence_index,
                });
            }
            let alignment = draft.into_alignment(&session.worker_id);
            state.check_alignment(session, &alignment)?;
            let duplicate = session.saved_alignments.iter().find(|s| {
                let a = &s.alignment;
                a.summary_sentence_index == alignment.summary_sentence_index
                    && a.highlight == alignment.highlight
                    && a.summary_spans == alignment.summary_spans
            });
            if let Some(dup) = duplicate {
                let outcome = SaveOutcome { status: SaveStatus::Duplicate, alignment_id: dup.alignment_id, session: session.clone() };
                return Ok((vec![], outcome));
            }
            let saved = SavedAlignment { alignment_id: state.next_alignment, alignment };
            let mut updated = session.clone();
            updated.saved_alignments.push(saved.clone());
            let outcome = SaveOutcome { status: SaveStatus::Saved, alignment_id: saved.alignment_id, session: updated };
            Ok((vec![Event::AlignmentSaved { session_id: session_id.to_string(), saved }], outcome))
        })
    }

    pub fn delete_alignment(&self, session_id: &str, alignment_id: u64) -> Result<AnnotationSession> {
        self.write(|state| {
            let session = state.open_session(session_id)?;
            if !session.saved_alignments.iter().any(|a| a.alignment_id == alignment_id) {
                return Err(AnnotationError::UnknownAlignment(alignment_id));
            }
            let mut updated = session.clone();
            updated.saved_alignments.retain(|a| a.alignment_id != alignment_id);
            Ok((vec![Event::AlignmentDeleted { session_id: session_id.to_string(), alignment_id }], updated))
        })
    }

    /// `NextSentence` saturates at the last sentence; `NextReview` moves to
    /// the next review at sentence 0, or on the last review flags the session
    /// ready to submit; `NextAspect` leaves the indices alone.
    pub fn advance(&self, session_id: &str, step: Step) -> Result<AnnotationSession> {
        self.write(|state| {
            let session = state.open_session(session_id)?;
            let pair = state.pair_of(session);
            let sentences = pair.summary.sentences.len();
            let reviews = pair.review_set.reviews.len();
            let mut updated = session.clone();
            match step {
                Step::NextAspect => return Ok((vec![], updated)),
                Step::NextSentence => {
                    updated.focused_sentence_index = (session.focused_sentence_index + 1).min(sentences.saturating_sub(1));
                }
                Step::NextReview if session.current_review_index + 1 < reviews => {
                    updated.current_review_index += 1;
                    updated.focused_sentence_index = 0;
                }
                Step::NextReview => updated.ready_to_submit = true,
            }
            if updated == *session {
                return Ok((vec![], updated));
            }
            let event = Event::SessionMoved {
                session_id: session_id.to_string(),
                review_index: updated.current_review_index,
                sentence_index: updated.focused_sentence_index,
                ready_to_submit: updated.ready_to_submit,
            };
            Ok((vec![event], updated))
        })
    }

    pub fn submit_session(&self, session_id: &str) -> Result<SubmissionReceipt> {
        self.write(|state| {
            let session = state.open_session(session_id)?;
            let sentences = state.pair_of(session).summary.sentences.len();
            let receipt = SubmissionReceipt {
                session_id: session_id.to_string(),
                alignment_count: session.saved_alignments.len(),
                unaligned_sentences: session.unaligned_sentences(sentences),
            };
            Ok((vec![Event::SessionSubmitted { session_id: session_id.to_string() }], receipt))
        })
    }

    /// Seeded audit sample of `round(rate × N)` submitted sessions, in id order.
    pub fn sample_for_review(&self, rate: f64, seed: u64) -> Result<Vec<AnnotationSession>> {
        self.read(|state| {
            if !(0.0..=1.0).contains(&rate) {
                return Err(AnnotationError::InvalidRate(rate));
            }
            let submitted: Vec<&AnnotationSession> =
                state.sessions.values().filter(|s| s.status == SessionStatus::Submitted).collect();
            let amount = ((rate * submitted.len() as f64).round() as usize).min(submitted.len());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = rand::seq::index::sample(&mut rng, submitted.len(), amount).into_vec();
            picked.sort_unstable();
            Ok(picked.into_iter().map(|i| submitted[i].clone()).collect())
        })
    }

    pub fn review_session(&self, session_id: &str, passed: bool, note: &str) -> Result<AnnotationSession> {
        self.write(|state| {
            let session = state.session(session_id)?;
            if session.status != SessionStatus::Submitted {
                return Err(AnnotationError::NotSubmitted(session_id.to_string()));
            }
            let review = SessionReview { passed, note: note.to_string() };
            let mut updated = session.clone();
            updated.status = SessionStatus::Reviewed;
            updated.review = Some(review.clone());
            Ok((vec![Event::SessionReviewed { session_id: session_id.to_string(), review }], updated))
        })
    }

    /// Alignments of every submitted or reviewed production session, ready
    /// for dataset assembly. Sessions whose review failed are left out.
    pub fn export_alignments(&self) -> Vec<PairAlignment> {
        let inner = self.inner.read().unwrap_or_else(|e| e.into_inner());
        let state = &inner.state;
        state
            .sessions
            .values()
            .filter(|s| match s.status {
                SessionStatus::Open => false,
                SessionStatus::Submitted => true,
                SessionStatus::Reviewed => s.review.as_ref().is_some_and(|r| r.passed),
            })
            .filter(|s| state.pair_of(s).purpose == PairPurpose::Production)
            .flat_map(|s| {
                s.saved_alignments.iter().map(|a| PairAlignment {
                    review_set_id: s.review_set_id.clone(),
                    summary_id: s.summary_id.clone(),
                    alignment: a.alignment.clone(),
                })
            })
            .collect()
    }

    /// Makes a system output available for human judgment.
    pub fn register_output(&self, output: OutputRef) -> Result<()> {
        self.write(|state| {
            let events = if state.outputs.contains(&output) { vec![] } else { vec![Event::OutputRegistered { output }] };
            Ok((events, ()))
        })
    }

    /// Stores a judgment; a later judgment for the same (judge, output, axis)
    /// replaces it. Returns the judgment id.
    pub fn record_judgment(&self, record: JudgmentRecord) -> Result<String> {
        self.write(|state| {
            if !record.axis.range().contains(&record.score) {
                return Err(AnnotationError::ScoreOutOfRange { axis: record.axis, score: record.score });
            }
            if !state.outputs.contains(&record.output_ref) {
                return Err(AnnotationError::UnknownOutput(record.output_ref.clone()));
            }
            let id = record.id();
            Ok((vec![Event::JudgmentRecorded { record }], id))
        })
    }

    pub fn aggregate_judgments(&self, output_ref: &OutputRef, axis: Axis) -> Result<JudgmentAggregate> {
        self.read(|state| {
            let scores: Vec<i64> = state
                .judgments
                .values()
                .filter(|j| j.axis == axis && j.output_ref == *output_ref)
                .map(|j| j.score)
                .collect();
            if scores.is_empty() {
                return Err(AnnotationError::NoJudgments { output_ref: output_ref.clone(), axis });
            }
            Ok(JudgmentAggregate {
                output_ref: output_ref.clone(),
                axis,
                mean: scores.iter().sum::<i64>() as f64 / scores.len() as f64,
                judges: scores.len(),
            })
        })
    }

    /// Mean over a system's judged outputs of the per-output mean score.
    pub fn system_axis_mean(&self, system_id: &str, axis: Axis) -> Option<f64> {
        let inner = self.inner.read().unwrap_or_else(|e| e.into_inner());
        let mut per_output: BTreeMap<&OutputRef, Vec<i64>> = BTreeMap::new();
        for j in inner.state.judgments.values() {
            if j.axis == axis && j.output_ref.system_id == system_id {
                per_output.entry(&j.output_ref).or_default().push(j.score);
            }
        }
        if per_output.is_empty() {
            return None;
        }
        let means: Vec<f64> = per_output.values().map(|s| s.iter().sum::<i64>() as f64 / s.len() as f64).collect();
        Some(means.iter().sum::<f64>() / means.len() as f64)
    }
}
