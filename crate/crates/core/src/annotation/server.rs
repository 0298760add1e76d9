//! HTTP+JSON surface of the annotation store.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use super::{AlignmentDraft, AnnotationError, AnnotationStore, Axis, JudgmentRecord, OutputRef, PairPurpose, RoundResult, Step};
use crate::corpus::{Document, Origin, RawDocument, ReviewSet};
use crate::error::Error;

/// Error body: `{"error": <code>, "message": <text>}`.
pub struct ApiError(pub Error);

impl<E: Into<Error>> From<E> for ApiError {
    fn from(e: E) -> Self {
        ApiError(e.into())
    }
}

fn root_cause(e: &Error) -> &Error {
    match e {
        Error::Context { source, .. } => root_cause(source),
        other => other,
    }
}

pub fn annotation_status(e: &AnnotationError) -> StatusCode {
    use AnnotationError::*;
    match e {
        UnknownWorker(_) | UnknownPair(_) | UnknownSession(_) | UnknownAlignment(_) | UnknownOutput(_) | NoJudgments { .. } => {
            StatusCode::NOT_FOUND
        }
        UnqualifiedWorker { .. } => StatusCode::FORBIDDEN,
        WorkerExists(_) | PairAlreadyAssigned { .. } | PairConflict(_) | SessionClosed(_) | NotSubmitted(_)
        | Qualification(_) | DuplicateFeedback { .. } => StatusCode::CONFLICT,
        SpanOutOfBounds(_) | InvalidAlignment(_) | WrongFocusedSentence { .. } | UnknownReview(_) | IndexOutOfRange { .. }
        | InvalidRate(_) | ScoreOutOfRange { .. } => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code) = match root_cause(&self.0) {
            Error::Annotation(e) => (annotation_status(e), e.code()),
            Error::Leaderboard(e) => (e.status(), e.code()),
            Error::Invalid(_) | Error::Json(_) | Error::Dataset(_) => (StatusCode::BAD_REQUEST, self.0.kind()),
            other => (StatusCode::INTERNAL_SERVER_ERROR, other.kind()),
        };
        let body = serde_json::json!({ "error": code, "message": self.0.to_string() });
        (status, Json(body)).into_response()
    }
}

pub type ApiResult<T> = Result<Json<T>, ApiError>;

type Store = Arc<AnnotationStore>;

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/sessions", post(start_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/alignments", post(save_alignment))
        .route("/sessions/{id}/alignments/{alignment_id}", delete(delete_alignment))
        .route("/sessions/{id}/advance", post(advance))
        .route("/sessions/{id}/submit", post(submit))
        .route("/sessions/{id}/review", post(review))
        .route("/sessions/{id}/embolden", get(embolden))
        .route("/review-sample", get(review_sample))
        .route("/workers", post(register_worker))
        .route("/workers/{id}", get(get_worker))
        .route("/workers/{id}/qualification", post(qualification))
        .route("/workers/{id}/tutorial", post(tutorial))
        .route("/pairs", post(register_pair))
        .route("/outputs", post(register_output))
        .route("/judgments", post(record_judgment))
        .route("/judgments/aggregate", get(aggregate))
        .with_state(store)
}

#[derive(Deserialize)]
struct StartSession {
    worker_id: String,
    review_set_id: String,
    summary_id: String,
}

async fn start_session(State(store): State<Store>, Json(req): Json<StartSession>) -> impl IntoResponse {
    match store.start_session(&req.worker_id, &req.review_set_id, &req.summary_id) {
        Ok(session) => (StatusCode::CREATED, Json(session)).into_response(),
        Err(e) => ApiError(e).into_response(),
    }
}

async fn get_session(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<super::AnnotationSession> {
    Ok(Json(store.session(&id)?))
}

async fn save_alignment(
    State(store): State<Store>,
    Path(id): Path<String>,
    Json(draft): Json<AlignmentDraft>,
) -> ApiResult<super::SaveOutcome> {
    Ok(Json(store.save_alignment(&id, draft)?))
}

async fn delete_alignment(
    State(store): State<Store>,
    Path((id, alignment_id)): Path<(String, u64)>,
) -> ApiResult<super::AnnotationSession> {
    Ok(Json(store.delete_alignment(&id, alignment_id)?))
}

#[derive(Deserialize)]
struct Advance {
    step: Step,
}

async fn advance(State(store): State<Store>, Path(id): Path<String>, Json(req): Json<Advance>) -> ApiResult<super::AnnotationSession> {
    Ok(Json(store.advance(&id, req.step)?))
}

async fn submit(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<super::SubmissionReceipt> {
    Ok(Json(store.submit_session(&id)?))
}

#[derive(Deserialize)]
struct Review {
    passed: bool,
    #[serde(default)]
    note: String,
}

async fn review(State(store): State<Store>, Path(id): Path<String>, Json(req): Json<Review>) -> ApiResult<super::AnnotationSession> {
    Ok(Json(store.review_session(&id, req.passed, &req.note)?))
}

#[derive(Deserialize)]
struct EmboldenQuery {
    review: usize,
}

#[derive(Serialize)]
struct Emboldened {
    review_index: usize,
    token_indices: Vec<usize>,
}

async fn embolden(State(store): State<Store>, Path(id): Path<String>, Query(q): Query<EmboldenQuery>) -> ApiResult<Emboldened> {
    let token_indices = store.embolden(&id, q.review)?;
    Ok(Json(Emboldened { review_index: q.review, token_indices }))
}

#[derive(Deserialize)]
struct SampleQuery {
    rate: f64,
    #[serde(default)]
    seed: u64,
}

async fn review_sample(State(store): State<Store>, Query(q): Query<SampleQuery>) -> ApiResult<Vec<super::AnnotationSession>> {
    Ok(Json(store.sample_for_review(q.rate, q.seed)?))
}

#[derive(Deserialize)]
struct RegisterWorker {
    worker_id: String,
}

async fn register_worker(State(store): State<Store>, Json(req): Json<RegisterWorker>) -> impl IntoResponse {
    match store.register_worker(&req.worker_id) {
        Ok(profile) => (StatusCode::CREATED, Json(profile)).into_response(),
        Err(e) => ApiError(e).into_response(),
    }
}

async fn get_worker(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<super::WorkerProfile> {
    Ok(Json(store.worker(&id)?))
}

#[derive(Deserialize)]
struct Qualification {
    result: RoundResult,
    #[serde(default)]
    note: String,
}

async fn qualification(
    State(store): State<Store>,
    Path(id): Path<String>,
    Json(req): Json<Qualification>,
) -> ApiResult<super::QualificationState> {
    Ok(Json(store.advance_qualification(&id, req.result, &req.note)?))
}

async fn tutorial(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<super::QualificationState> {
    Ok(Json(store.complete_tutorial(&id)?))
}

#[derive(Deserialize)]
struct RegisterPair {
    review_set_id: String,
    #[serde(default = "default_origin")]
    origin: Origin,
    reviews: Vec<RawDocument>,
    summary: RawDocument,
    #[serde(default = "default_purpose")]
    purpose: PairPurpose,
}

fn default_origin() -> Origin {
    Origin::Other
}

fn default_purpose() -> PairPurpose {
    PairPurpose::Production
}

#[derive(Serialize)]
struct PairId {
    pair_id: String,
}

async fn register_pair(State(store): State<Store>, Json(req): Json<RegisterPair>) -> ApiResult<PairId> {
    let review_set = ReviewSet {
        id: req.review_set_id,
        reviews: req.reviews.into_iter().map(Document::from).collect(),
        origin: req.origin,
    };
    let pair_id = store.register_pair(review_set, Document::from(req.summary), req.purpose)?;
    Ok(Json(PairId { pair_id }))
}

async fn register_output(State(store): State<Store>, Json(output): Json<OutputRef>) -> ApiResult<OutputRef> {
    store.register_output(output.clone())?;
    Ok(Json(output))
}

#[derive(Serialize)]
struct JudgmentId {
    id: String,
}

async fn record_judgment(State(store): State<Store>, Json(record): Json<JudgmentRecord>) -> ApiResult<JudgmentId> {
    Ok(Json(JudgmentId { id: store.record_judgment(record)? }))
}

#[derive(Deserialize)]
struct AggregateQuery {
    instance_id: String,
    system_id: String,
    axis: Axis,
}

async fn aggregate(State(store): State<Store>, Query(q): Query<AggregateQuery>) -> ApiResult<super::JudgmentAggregate> {
    let output = OutputRef { instance_id: q.instance_id, system_id: q.system_id };
    Ok(Json(store.aggregate_judgments(&output, q.axis)?))
}
