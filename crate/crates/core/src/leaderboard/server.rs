//! Leaderboard HTTP endpoints.

use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;

use super::{Leaderboard, SubmissionLine};
use crate::annotation::server::ApiError;
use crate::annotation::{AnnotationStore, OutputRef};
use crate::corpus::FicInstance;
use crate::gateway::Scorer;
use crate::metrics::EvalConfig;

#[derive(Clone)]
pub struct LeaderboardContext {
    pub board: Arc<Leaderboard>,
    pub instances: Arc<Vec<FicInstance>>,
    pub scorer: Arc<dyn Scorer>,
    pub config: EvalConfig,
    /// When set, accepted outputs become available for human judgment and
    /// judgment means appear on the leaderboard.
    pub judgments: Option<Arc<AnnotationStore>>,
}

pub fn router(ctx: LeaderboardContext) -> Router {
    Router::new()
        .route("/submissions", post(submit))
        .route("/leaderboard", get(leaderboard))
        .with_state(ctx)
}

#[derive(Deserialize)]
struct SubmitRequest {
    system_id: String,
    outputs: Vec<SubmissionLine>,
    #[serde(default)]
    replace: bool,
}

async fn submit(State(ctx): State<LeaderboardContext>, Json(req): Json<SubmitRequest>) -> Response {
    let result = ctx
        .board
        .submit(&req.system_id, &req.outputs, &ctx.instances, ctx.scorer.as_ref(), &ctx.config, req.replace)
        .await;
    let submission = match result {
        Ok(s) => s,
        Err(e) => return ApiError(e).into_response(),
    };
    if let Some(store) = &ctx.judgments {
        for output in &submission.outputs {
            let output = OutputRef { instance_id: output.instance_id.clone(), system_id: output.system_id.clone() };
            if let Err(e) = store.register_output(output) {
                return ApiError(e).into_response();
            }
        }
    }
    let body = serde_json::json!({ "system_id": submission.system_id, "scores": submission.scores });
    (StatusCode::CREATED, Json(body)).into_response()
}

#[derive(Deserialize)]
struct LeaderboardQuery {
    #[serde(default)]
    format: Option<String>,
}

async fn leaderboard(State(ctx): State<LeaderboardContext>, Query(q): Query<LeaderboardQuery>) -> Response {
    let table = ctx.board.render(ctx.judgments.as_deref());
    match q.format.as_deref() {
        Some("text") => ([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], table.render_text()).into_response(),
        _ => Json(table).into_response(),
    }
}
