//! HTTP service for interactive play under a hidden rule.
//!
//! Routes live under `/v1`. The rule text never leaves the server while a
//! session is live; transcripts of live sessions are served with the rule
//! fields blanked.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::board::Bucket;
use crate::engine::{
    new_episode, EngineError, EpisodeParams, EpisodeState, EpisodeStatus, MoveAttempt,
};
use crate::rng::stream_seed;
use crate::rule::{canonical_form, parse_rule, validate};
use crate::transcript::{
    AttemptRecord, GuessRecord, LearnerKind, SessionRecord, TranscriptError, TranscriptStore,
};

pub const DEFAULT_PORT: u16 = 8787;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub port: u16,
    pub rules_dir: Option<PathBuf>,
    pub data_dir: PathBuf,
    /// Directory served under `/app/`.
    pub static_dir: Option<PathBuf>,
    pub params: EpisodeParams,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            port: DEFAULT_PORT,
            rules_dir: None,
            data_dir: PathBuf::from("data"),
            static_dir: None,
            params: EpisodeParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    InProgress,
    AwaitingGuess,
    Done,
}

struct Session {
    header: SessionRecord,
    state: EpisodeState,
    episode: usize,
    attempt_in_episode: usize,
    episodes_target: usize,
    episodes_completed: usize,
    attempts: usize,
    reward_sum: i64,
    phase: Phase,
    last_response: Option<MoveResponse>,
}

impl Session {
    fn view(&self) -> SessionView {
        SessionView {
            session_id: self.header.session_id.clone(),
            learner_kind: self.header.learner_kind,
            learner_id: self.header.learner_id.clone(),
            params: self.header.params(),
            board: self.state.board().pattern(),
            episode: self.episode,
            episodes_target: self.episodes_target,
            episodes_completed: self.episodes_completed,
            attempts: self.attempts,
            reward_sum: self.reward_sum,
            phase: self.phase,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub learner_kind: LearnerKind,
    pub learner_id: String,
    pub params: EpisodeParams,
    pub board: String,
    pub episode: usize,
    pub episodes_target: usize,
    pub episodes_completed: usize,
    pub attempts: usize,
    pub reward_sum: i64,
    pub phase: Phase,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    #[serde(default)]
    pub rule_text: Option<String>,
    #[serde(default)]
    pub rule_id: Option<String>,
    pub learner_id: String,
    pub episodes_target: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub learner_kind: Option<LearnerKind>,
    #[serde(default)]
    pub params: Option<EpisodeParams>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub position: usize,
    pub bucket: Bucket,
    /// 1-based count of this attempt within the session. Retrying the last
    /// index returns the stored response instead of playing again.
    #[serde(default)]
    pub attempt_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveResponse {
    pub attempt_index: usize,
    pub accepted: bool,
    pub reward: i32,
    /// Board to play next: the next episode's board after a clear.
    pub board: String,
    /// Status of the episode the move was played in.
    pub episode_status: EpisodeStatus,
    pub episode: usize,
    pub episodes_completed: usize,
    pub episodes_target: usize,
    pub reward_sum: i64,
    pub phase: Phase,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuessRequest {
    pub guess_text: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
    fn not_found(what: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown {what}"))
    }
    fn conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, message)
    }
    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
    fn internal(err: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, err.to_string())
    }
}

impl From<TranscriptError> for ApiError {
    fn from(e: TranscriptError) -> Self {
        match e {
            TranscriptError::UnknownSession(_) => ApiError::not_found("session"),
            other => ApiError::internal(other),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type SessionSlot = Arc<tokio::sync::Mutex<Session>>;

#[derive(Clone)]
pub struct AppState {
    store: TranscriptStore,
    rules_dir: Option<PathBuf>,
    params: EpisodeParams,
    sessions: Arc<Mutex<HashMap<String, SessionSlot>>>,
}

impl AppState {
    pub fn new(config: &ServiceConfig) -> Result<Self, TranscriptError> {
        Ok(Self {
            store: TranscriptStore::open(&config.data_dir)?,
            rules_dir: config.rules_dir.clone(),
            params: config.params,
            sessions: Arc::default(),
        })
    }

    pub fn store(&self) -> &TranscriptStore {
        &self.store
    }

    fn slot(&self, id: &str) -> Option<SessionSlot> {
        self.sessions
            .lock()
            .expect("session map poisoned")
            .get(id)
            .cloned()
    }
}

/// Rule ids under `dir`: paths of `*.rule` files relative to `dir`, without
/// the extension, `/`-separated, sorted.
pub fn list_rule_ids(dir: &Path) -> std::io::Result<Vec<String>> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<String>) -> std::io::Result<()> {
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else if path.extension().is_some_and(|e| e == "rule") {
                let rel = path
                    .strip_prefix(root)
                    .expect("walk stays under root")
                    .with_extension("");
                let parts: Vec<String> = rel
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy().into_owned())
                    .collect();
                out.push(parts.join("/"));
            }
        }
        Ok(())
    }
    let mut ids = Vec::new();
    walk(dir, dir, &mut ids)?;
    ids.sort();
    Ok(ids)
}

fn load_rule_text(state: &AppState, rule_id: &str) -> Result<String, ApiError> {
    let dir = state
        .rules_dir
        .as_deref()
        .ok_or_else(|| ApiError::not_found("rule_id"))?;
    let ids = list_rule_ids(dir).map_err(ApiError::internal)?;
    if !ids.iter().any(|id| id == rule_id) {
        return Err(ApiError::not_found("rule_id"));
    }
    std::fs::read_to_string(dir.join(format!("{rule_id}.rule"))).map_err(ApiError::internal)
}

pub fn router(state: AppState, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", post(post_move))
        .route("/sessions/{id}/guess", post(post_guess))
        .route("/sessions/{id}/transcript", get(get_transcript))
        .route("/rules", get(get_rules))
        .with_state(state);
    let app = Router::new().nest("/v1", api);
    match static_dir {
        Some(dir) => app.nest_service(
            "/app",
            ServeDir::new(dir).append_index_html_on_directories(true),
        ),
        None => app
            .route("/app", get(placeholder))
            .route("/app/", get(placeholder)),
    }
}

async fn placeholder() -> Html<&'static str> {
    Html("<!doctype html><title>rulegame</title><p>No client bundle configured. Start the server with --static-dir.</p>")
}

async fn get_rules(State(state): State<AppState>) -> Result<Json<serde_json::Value>, ApiError> {
    let ids = match &state.rules_dir {
        Some(dir) => list_rule_ids(dir).map_err(ApiError::internal)?,
        None => Vec::new(),
    };
    Ok(Json(json!({ "rule_ids": ids })))
}

async fn create_session(
    State(state): State<AppState>,
    Json(req): Json<CreateSession>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let text = match (&req.rule_text, &req.rule_id) {
        (Some(t), None) => t.clone(),
        (None, Some(id)) => load_rule_text(&state, id)?,
        _ => {
            return Err(ApiError::bad_request(
                "give exactly one of rule_text and rule_id",
            ))
        }
    };
    let rule = parse_rule(&text).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let params = req.params.unwrap_or(state.params);
    params
        .check()
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let report = validate(&rule, &params);
    if !report.ok {
        return Err(ApiError::bad_request(report.errors.join("; ")));
    }
    if req.episodes_target == 0 {
        return Err(ApiError::bad_request("episodes_target must be at least 1"));
    }
    let master_seed = req.seed.unwrap_or_else(rand::random);
    let kind = req.learner_kind.unwrap_or(LearnerKind::Human);
    let header = SessionRecord::new(
        kind,
        &req.learner_id,
        &canonical_form(&rule),
        &params,
        master_seed,
    );
    let episode =
        new_episode(rule, &params, stream_seed(master_seed, 1)).map_err(ApiError::internal)?;
    state.store.create_session(&header)?;
    let session = Session {
        header,
        state: episode,
        episode: 1,
        attempt_in_episode: 0,
        episodes_target: req.episodes_target,
        episodes_completed: 0,
        attempts: 0,
        reward_sum: 0,
        phase: Phase::InProgress,
        last_response: None,
    };
    let view = session.view();
    state.sessions.lock().expect("session map poisoned").insert(
        view.session_id.clone(),
        Arc::new(tokio::sync::Mutex::new(session)),
    );
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionView>, ApiError> {
    let slot = state
        .slot(&id)
        .ok_or_else(|| ApiError::not_found("session"))?;
    let session = slot.lock().await;
    Ok(Json(session.view()))
}

async fn post_move(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Json(req): Json<MoveRequest>,
) -> Result<Json<MoveResponse>, ApiError> {
    let slot = state
        .slot(&id)
        .ok_or_else(|| ApiError::not_found("session"))?;
    let mut s = slot.lock().await;

    if let Some(index) = req.attempt_index {
        if index == s.attempts && index > 0 {
            return match &s.last_response {
                Some(last) => Ok(Json(last.clone())),
                None => Err(ApiError::conflict("duplicate attempt_index")),
            };
        }
        if index != s.attempts + 1 {
            return Err(ApiError::conflict(format!(
                "attempt_index {index} out of sequence (next is {})",
                s.attempts + 1
            )));
        }
    }
    if s.phase != Phase::InProgress {
        return Err(ApiError::conflict("session finished"));
    }
    let length = s.header.length;
    if req.position == 0 || req.position > length {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            format!("position {} out of range 1..{length}", req.position),
        ));
    }

    let board_before = s.state.board().pattern();
    let outcome = s
        .state
        .attempt_move(MoveAttempt::new(req.position, req.bucket))
        .map_err(|e| match e {
            EngineError::PositionOutOfRange { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string())
            }
            EngineError::EpisodeFinished => ApiError::conflict(e.to_string()),
            other => ApiError::internal(other),
        })?;
    let record = AttemptRecord {
        episode: s.episode,
        attempt: s.attempt_in_episode + 1,
        board_before,
        position: req.position,
        bucket: req.bucket,
        accepted: outcome.accepted,
        reward: outcome.reward,
    };
    state.store.append_attempt(&s.header.session_id, &record)?;

    s.attempt_in_episode += 1;
    s.attempts += 1;
    s.reward_sum += i64::from(outcome.reward);
    let played_in = s.episode;
    if outcome.status.is_terminal() {
        s.episodes_completed += 1;
        if s.episodes_completed < s.episodes_target {
            s.episode += 1;
            let seed = stream_seed(s.header.master_seed, s.episode as u64);
            let rule = s.state.rule().clone();
            let params = *s.state.params();
            s.state = new_episode(rule, &params, seed).map_err(ApiError::internal)?;
            s.attempt_in_episode = 0;
        } else {
            s.phase = match s.header.learner_kind {
                LearnerKind::Human => Phase::AwaitingGuess,
                LearnerKind::Machine => Phase::Done,
            };
        }
    }
    let response = MoveResponse {
        attempt_index: s.attempts,
        accepted: outcome.accepted,
        reward: outcome.reward,
        board: s.state.board().pattern(),
        episode_status: outcome.status,
        episode: played_in,
        episodes_completed: s.episodes_completed,
        episodes_target: s.episodes_target,
        reward_sum: s.reward_sum,
        phase: s.phase,
    };
    s.last_response = Some(response.clone());
    Ok(Json(response))
}

async fn post_guess(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Json(req): Json<GuessRequest>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let slot = state
        .slot(&id)
        .ok_or_else(|| ApiError::not_found("session"))?;
    let mut s = slot.lock().await;
    if s.phase != Phase::AwaitingGuess {
        return Err(ApiError::conflict("session is not awaiting a guess"));
    }
    if req.guess_text.trim().is_empty() {
        return Err(ApiError::bad_request("guess_text is empty"));
    }
    state
        .store
        .append_guess(&s.header.session_id, &GuessRecord::now(&req.guess_text))?;
    s.phase = Phase::Done;
    Ok(Json(
        json!({ "session_id": s.header.session_id, "phase": s.phase }),
    ))
}

async fn get_transcript(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Response, ApiError> {
    let live = match state.slot(&id) {
        Some(slot) => slot.lock().await.phase != Phase::Done,
        None => false,
    };
    let body = if live {
        state.store.read_session(&id)?.render(false, true)
    } else {
        state.store.raw(&id)?
    };
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}

/// Binds `0.0.0.0:<port>` and serves until interrupted.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::new(&config).map_err(std::io::Error::other)?;
    let app = router(state, config.static_dir.as_deref());
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
