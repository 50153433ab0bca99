//! HTTP service under `/v1`.
//!
//! Every operation answers `{"result", "timing_ms", "stats"}` where `result`
//! is the same JSON the command line prints with `--format json`. Errors
//! answer `{"error": {"code", "message"}, "stats"}`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

use crate::json::{ParamsJson, ProblemJson};
use crate::ops::{self, OpError, Output, ProblemInput};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryStep {
    pub id: usize,
    pub parent: Option<usize>,
    pub op: String,
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub problems: BTreeMap<String, ProblemJson>,
    /// Append-only; a step's parent is the step that produced its input.
    pub history: Vec<HistoryStep>,
}

#[derive(Debug, Clone, PartialEq)]
enum JobState {
    Running,
    Done(Output),
    Failed(OpError),
}

struct Job {
    cancel: Arc<AtomicBool>,
    state: Arc<Mutex<JobState>>,
}

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<BTreeMap<String, Arc<Mutex<Session>>>>>,
    jobs: Arc<Mutex<BTreeMap<String, Job>>>,
    next_id: Arc<AtomicU64>,
    /// Time allowed to synchronous operations.
    pub budget: Duration,
}

impl Default for AppState {
    fn default() -> Self {
        AppState {
            sessions: Arc::default(),
            jobs: Arc::default(),
            next_id: Arc::new(AtomicU64::new(1)),
            budget: Duration::from_secs(5),
        }
    }
}

impl AppState {
    pub fn with_budget(budget: Duration) -> Self {
        AppState {
            budget,
            ..AppState::default()
        }
    }

    fn fresh_id(&self, prefix: &str) -> String {
        format!("{prefix}{}", self.next_id.fetch_add(1, Ordering::Relaxed))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, OpError> {
        self.sessions
            .lock()
            .expect("sessions lock")
            .get(id)
            .cloned()
            .ok_or_else(|| OpError::NotFound(format!("session {id}")))
    }
}

pub struct ApiError(OpError);

impl From<OpError> for ApiError {
    fn from(e: OpError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.status()).expect("status");
        (status, Json(self.0.to_json())).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn envelope(out: Output, started: Instant) -> Json<Value> {
    Json(json!({
        "result": out.value,
        "timing_ms": started.elapsed().as_secs_f64() * 1000.0,
        "stats": out.stats,
    }))
}

/// Runs `f` on the blocking pool. Past the budget the cancel flag is raised
/// and the request answers 503.
async fn budgeted<F>(state: &AppState, f: F) -> ApiResult
where
    F: FnOnce(&AtomicBool) -> Result<Output, OpError> + Send + 'static,
{
    let started = Instant::now();
    let cancel = Arc::new(AtomicBool::new(false));
    let flag = cancel.clone();
    let task = tokio::task::spawn_blocking(move || f(&flag));
    match tokio::time::timeout(state.budget, task).await {
        Ok(Ok(r)) => Ok(envelope(r?, started)),
        Ok(Err(e)) => Err(OpError::BadRequest(format!("operation panicked: {e}")).into()),
        Err(_) => {
            cancel.store(true, Ordering::Relaxed);
            Err(OpError::BlowUp {
                message: format!("time budget of {} ms exceeded; use the job endpoints", state.budget.as_millis()),
                stats: None,
            }
            .into())
        }
    }
}

/// Request body rejections become 400s in the error shape.
pub struct Body<T>(T);

impl<S, T> axum::extract::FromRequest<S> for Body<T>
where
    T: serde::de::DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: axum::extract::Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(Body(v)),
            Err(e) => Err(OpError::BadRequest(e.body_text()).into()),
        }
    }
}

macro_rules! sync_op {
    ($name:ident, $req:ty, |$r:ident, $c:ident| $body:expr) => {
        async fn $name(State(state): State<AppState>, Body($r): Body<$req>) -> ApiResult {
            budgeted(&state, move |$c: &AtomicBool| {
                let _ = $c;
                $body
            })
            .await
        }
    };
}

#[derive(Debug, Deserialize)]
pub struct TextReq {
    pub text: String,
}

#[derive(Debug, Deserialize)]
pub struct ProblemReq {
    pub problem: ProblemInput,
}

#[derive(Debug, Deserialize)]
pub struct DeltaReq {
    pub delta: usize,
}

sync_op!(parse, TextReq, |r, c| ops::parse(&r.text));
sync_op!(serialize, ProblemReq, |r, c| ops::serialize(&r.problem));
sync_op!(re, ops::EngineReq, |r, c| ops::run_re(&r, Some(c)));
sync_op!(rere, ops::EngineReq, |r, c| ops::run_rere(&r, Some(c)));
sync_op!(diagram, ops::SideReq, |r, c| ops::diagram(&r));
sync_op!(right_closed, ops::SideReq, |r, c| ops::right_closed(&r));
sync_op!(relax_check, ops::RelaxReq, |r, c| ops::relax_check(&r));
sync_op!(speedup_verify, ops::SpeedupReq, |r, c| ops::speedup_verify(&r, Some(c)));
sync_op!(zero_round, ProblemReq, |r, c| ops::zero_round(&r.problem));
sync_op!(failure_bound, ProblemReq, |r, c| ops::failure_bound(&r.problem));
sync_op!(simplify, ProblemReq, |r, c| ops::simplify(&r.problem));
sync_op!(family, ParamsJson, |r, c| ops::family(&r));
sync_op!(plus, ParamsJson, |r, c| ops::plus(&r));
sync_op!(mis, DeltaReq, |r, c| ops::mis(r.delta));
sync_op!(expected_re, ParamsJson, |r, c| ops::expected_re(&r));
sync_op!(sequence, ops::SequenceReq, |r, c| ops::sequence(&r, Some(c)));
sync_op!(iso, ops::IsoReq, |r, c| ops::iso(&r));
sync_op!(simulate_kods, ops::KodsReq, |r, c| ops::simulate_kods(&r));
sync_op!(simulate_transform, ops::TransformReq, |r, c| ops::simulate_transform(&r));
sync_op!(simulate_check, ops::CheckReq, |r, c| ops::simulate_check(&r));

fn start_job<F>(state: &AppState, f: F) -> (StatusCode, Json<Value>)
where
    F: FnOnce(&AtomicBool) -> Result<Output, OpError> + Send + 'static,
{
    let id = state.fresh_id("j");
    let cancel = Arc::new(AtomicBool::new(false));
    let job_state = Arc::new(Mutex::new(JobState::Running));
    state.jobs.lock().expect("jobs lock").insert(
        id.clone(),
        Job {
            cancel: cancel.clone(),
            state: job_state.clone(),
        },
    );
    tokio::task::spawn_blocking(move || {
        let r = f(&cancel);
        *job_state.lock().expect("job lock") = match r {
            Ok(o) => JobState::Done(o),
            Err(e) => JobState::Failed(e),
        };
    });
    (StatusCode::ACCEPTED, Json(json!({ "job": id })))
}

async fn job_rere(State(state): State<AppState>, Body(r): Body<ops::EngineReq>) -> impl IntoResponse {
    start_job(&state, move |c| ops::run_rere(&r, Some(c)))
}

async fn job_sequence(State(state): State<AppState>, Body(r): Body<ops::SequenceReq>) -> impl IntoResponse {
    start_job(&state, move |c| ops::sequence(&r, Some(c)))
}

fn job_json(id: &str, job: &Job) -> Value {
    match &*job.state.lock().expect("job lock") {
        JobState::Running => json!({ "job": id, "status": "running" }),
        JobState::Done(o) => json!({ "job": id, "status": "done", "result": o.value, "stats": o.stats }),
        JobState::Failed(e) => {
            let status = if matches!(e, OpError::Cancelled(_)) { "cancelled" } else { "failed" };
            let mut v = e.to_json();
            v["job"] = json!(id);
            v["status"] = json!(status);
            v
        }
    }
}

async fn job_get(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let jobs = state.jobs.lock().expect("jobs lock");
    let job = jobs.get(&id).ok_or_else(|| OpError::NotFound(format!("job {id}")))?;
    Ok(Json(job_json(&id, job)))
}

async fn job_cancel(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let jobs = state.jobs.lock().expect("jobs lock");
    let job = jobs.get(&id).ok_or_else(|| OpError::NotFound(format!("job {id}")))?;
    job.cancel.store(true, Ordering::Relaxed);
    Ok(Json(job_json(&id, job)))
}

fn session_json(id: &str, s: &Session) -> Value {
    json!({
        "id": id,
        "problems": s.problems.keys().collect::<Vec<_>>(),
        "steps": s.history.len(),
    })
}

async fn session_create(State(state): State<AppState>) -> impl IntoResponse {
    let id = state.fresh_id("s");
    let s = Session::default();
    let body = session_json(&id, &s);
    state.sessions.lock().expect("sessions lock").insert(id, Arc::new(Mutex::new(s)));
    (StatusCode::CREATED, Json(body))
}

async fn session_get(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let s = state.session(&id)?;
    let s = s.lock().expect("session lock");
    Ok(Json(session_json(&id, &s)))
}

async fn session_delete(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    state
        .sessions
        .lock()
        .expect("sessions lock")
        .remove(&id)
        .ok_or_else(|| OpError::NotFound(format!("session {id}")))?;
    Ok(Json(json!({ "deleted": id })))
}

async fn problem_put(
    State(state): State<AppState>,
    Path((id, name)): Path<(String, String)>,
    Body(r): Body<ProblemReq>,
) -> ApiResult {
    let p = ProblemJson::from_problem(&r.problem.resolve()?);
    let s = state.session(&id)?;
    let mut s = s.lock().expect("session lock");
    if s.problems.contains_key(&name) {
        return Err(OpError::BadRequest(format!("problem {name} exists; recorded problems are immutable")).into());
    }
    s.problems.insert(name.clone(), p.clone());
    Ok(Json(json!({ "name": name, "problem": p })))
}

async fn problem_get(State(state): State<AppState>, Path((id, name)): Path<(String, String)>) -> ApiResult {
    let s = state.session(&id)?;
    let s = s.lock().expect("session lock");
    let p = s.problems.get(&name).ok_or_else(|| OpError::NotFound(format!("problem {name}")))?;
    Ok(Json(json!({ "name": name, "problem": p })))
}

#[derive(Debug, Deserialize)]
pub struct StepReq {
    /// `re`, `rere` or `simplify`.
    pub op: String,
    pub input: String,
    /// Name for the result; defaults to a fresh one.
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub limits: ops::LimitsJson,
    #[serde(default)]
    pub rename: BTreeMap<String, String>,
}

async fn step_post(State(state): State<AppState>, Path(id): Path<String>, Body(r): Body<StepReq>) -> ApiResult {
    let started = Instant::now();
    let session = state.session(&id)?;
    let input = {
        let s = session.lock().expect("session lock");
        s.problems
            .get(&r.input)
            .cloned()
            .ok_or_else(|| OpError::NotFound(format!("problem {}", r.input)))?
    };
    let op = r.op.clone();
    let req = ops::EngineReq {
        problem: ProblemInput::Json(input),
        limits: r.limits.clone(),
        rename: r.rename.clone(),
    };
    let envelope = budgeted(&state, move |c| match op.as_str() {
        "re" => ops::run_re(&req, Some(c)),
        "rere" => ops::run_rere(&req, Some(c)),
        "simplify" => ops::simplify(&req.problem),
        other => Err(OpError::BadRequest(format!("unknown step operation {other}"))),
    })
    .await?;
    let result = &envelope.0["result"];
    let produced: ProblemJson = serde_json::from_value(result.get("problem").cloned().unwrap_or_else(|| result.clone()))
        .map_err(|e| OpError::BadRequest(e.to_string()))?;

    let mut s = session.lock().expect("session lock");
    let step_id = s.history.len();
    let output = r.output.clone().unwrap_or_else(|| format!("{}{}", r.op, step_id));
    if s.problems.contains_key(&output) {
        return Err(OpError::BadRequest(format!("problem {output} exists; recorded problems are immutable")).into());
    }
    let parent = s.history.iter().rev().find(|h| h.output == r.input).map(|h| h.id);
    let step = HistoryStep {
        id: step_id,
        parent,
        op: r.op.clone(),
        input: r.input.clone(),
        output: output.clone(),
    };
    s.problems.insert(output, produced);
    s.history.push(step.clone());
    Ok(Json(json!({
        "step": step,
        "result": envelope.0["result"],
        "timing_ms": started.elapsed().as_secs_f64() * 1000.0,
        "stats": envelope.0["stats"],
    })))
}

#[derive(Debug, Serialize)]
struct TreeNode {
    step: HistoryStep,
    children: Vec<TreeNode>,
}

fn subtree(steps: &[HistoryStep], parent: Option<usize>) -> Vec<TreeNode> {
    steps
        .iter()
        .filter(|s| s.parent == parent)
        .map(|s| TreeNode {
            step: s.clone(),
            children: subtree(steps, Some(s.id)),
        })
        .collect()
}

async fn history_get(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let s = state.session(&id)?;
    let s = s.lock().expect("session lock");
    Ok(Json(json!({ "steps": s.history, "roots": subtree(&s.history, None) })))
}

async fn session_export(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let s = state.session(&id)?;
    let s = s.lock().expect("session lock");
    Ok(Json(serde_json::to_value(&*s).expect("serializable")))
}

async fn session_import(State(state): State<AppState>, Body(s): Body<Session>) -> Result<impl IntoResponse, ApiError> {
    for (name, p) in &s.problems {
        p.to_problem().map_err(|e| OpError::BadRequest(format!("problem {name}: {e}")))?;
    }
    for (i, h) in s.history.iter().enumerate() {
        let parent_ok = h.parent.is_none_or(|p| p < i);
        if h.id != i || !parent_ok || !s.problems.contains_key(&h.output) {
            return Err(OpError::BadRequest(format!("history step {i} is inconsistent")).into());
        }
    }
    let id = state.fresh_id("s");
    let body = session_json(&id, &s);
    state.sessions.lock().expect("sessions lock").insert(id, Arc::new(Mutex::new(s)));
    Ok((StatusCode::CREATED, Json(body)))
}

async fn not_found() -> ApiError {
    OpError::NotFound("no such endpoint".into()).into()
}

pub fn router(state: AppState) -> Router {
    let v1 = Router::new()
        .route("/parse", post(parse))
        .route("/serialize", post(serialize))
        .route("/re", post(re))
        .route("/rere", post(rere))
        .route("/diagram", post(diagram))
        .route("/right-closed-sets", post(right_closed))
        .route("/relax-check", post(relax_check))
        .route("/speedup-verify", post(speedup_verify))
        .route("/zero-round", post(zero_round))
        .route("/failure-bound", post(failure_bound))
        .route("/simplify", post(simplify))
        .route("/family", post(family))
        .route("/plus", post(plus))
        .route("/mis", post(mis))
        .route("/expected-re", post(expected_re))
        .route("/sequence", post(sequence))
        .route("/iso", post(iso))
        .route("/simulate-kods", post(simulate_kods))
        .route("/simulate-transform", post(simulate_transform))
        .route("/simulate-check", post(simulate_check))
        .route("/jobs/rere", post(job_rere))
        .route("/jobs/sequence", post(job_sequence))
        .route("/jobs/{id}", get(job_get).delete(job_cancel))
        .route("/sessions", post(session_create))
        .route("/sessions/import", post(session_import))
        .route("/sessions/{id}", get(session_get).delete(session_delete))
        .route("/sessions/{id}/problems/{name}", put(problem_put).get(problem_get))
        .route("/sessions/{id}/steps", post(step_post))
        .route("/sessions/{id}/history", get(history_get))
        .route("/sessions/{id}/export", get(session_export));
    Router::new()
        .nest("/v1", v1)
        .fallback(not_found)
        .layer(CorsLayer::permissive())
        .with_state(state)
}

