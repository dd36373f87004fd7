use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::{Body, Bytes};
use axum::extract::{Path, Query, Request, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower::ServiceExt;
use tower_http::services::ServeFile;
use vsat_core::fixes::CueAnchor;
use vsat_core::media::{AUDIO_FILE, FRAME_FILE};
use vsat_core::pipeline::{FixArtifacts, RunReport, TOOL_VERSION};
use vsat_core::review::{DecisionAction, DecisionLog, Project, ProjectStatus, ReviewDecision};
use vsat_core::{Cue, Issue, IssueKind, SubtitleFormat, Suggestion};

use crate::error::ApiError;
use crate::store::{Record, Store};

pub const ACTOR_HEADER: &str = "x-actor";

type ApiResult<T> = Result<T, ApiError>;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/healthz", get(health))
        .route("/api/v1/projects", post(create_project).get(list_projects))
        .route("/api/v1/projects/{id}", get(get_project))
        .route("/api/v1/projects/{id}/cues", get(list_cues))
        .route("/api/v1/projects/{id}/issues", get(list_issues))
        .route("/api/v1/projects/{id}/issues/{iid}/decision", post(decide))
        .route("/api/v1/projects/{id}/cues/{cid}/edit", post(manual_edit))
        .route("/api/v1/projects/{id}/export", post(export))
        .route("/api/v1/projects/{id}/assets/{cue}/{asset}", get(asset))
        .with_state(store)
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::Validation {
        message: format!("invalid request body: {e}"),
        details: json!({ "line": e.line(), "column": e.column() }),
    })
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

fn actor(headers: &HeaderMap) -> String {
    headers
        .get(ACTOR_HEADER)
        .and_then(|v| v.to_str().ok())
        .filter(|s| !s.is_empty())
        .unwrap_or("anonymous")
        .to_string()
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok", "version": TOOL_VERSION }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateProject {
    #[serde(default)]
    pub video: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    pub format: SubtitleFormat,
    pub subtitles: String,
    pub report: RunReport,
    #[serde(default)]
    pub assets: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectSummary {
    pub project_id: String,
    pub video: Option<String>,
    pub name: String,
    pub format: SubtitleFormat,
    pub status: ProjectStatus,
    pub cue_count: usize,
    pub original_cue_count: usize,
    pub issue_count: usize,
    pub decided_count: usize,
    pub log: DecisionLog,
}

fn summary(p: &Project) -> ProjectSummary {
    ProjectSummary {
        project_id: p.project_id.clone(),
        video: p.video.clone(),
        name: p.name.clone(),
        format: p.original_doc.format,
        status: p.status,
        cue_count: p.doc.cues.len(),
        original_cue_count: p.original_doc.cues.len(),
        issue_count: p.issues.len(),
        decided_count: p.log.effective().len(),
        log: p.log.clone(),
    }
}

/// Loads a project directly, bypassing HTTP.
pub fn create(store: &Store, req: CreateProject) -> ApiResult<(ProjectSummary, bool)> {
    let name = req.name.as_deref().unwrap_or("subtitles");
    let project = Project::new(req.video, name, &req.subtitles, req.format, &req.report)?;
    let (record, created) = store.insert(Record {
        project,
        assets: req.assets,
    })?;
    Ok((summary(&record.project), created))
}

async fn create_project(State(store): State<Arc<Store>>, body: Bytes) -> ApiResult<Response> {
    let (summary, created) = create(&store, parse_body(&body)?)?;
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    Ok((status, Json(summary)).into_response())
}

async fn list_projects(State(store): State<Arc<Store>>) -> ApiResult<Json<Vec<ProjectSummary>>> {
    let mut out = Vec::new();
    for id in store.ids() {
        out.push(summary(&store.get(&id)?.project));
    }
    Ok(Json(out))
}

async fn get_project(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<Json<ProjectSummary>> {
    Ok(Json(summary(&store.get(&id)?.project)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssetLinks {
    pub audio: String,
    pub frame: String,
}

fn links(project_id: &str, original_cue: u32) -> AssetLinks {
    let base = format!("/api/v1/projects/{project_id}/assets/{original_cue}");
    AssetLinks {
        audio: format!("{base}/audio"),
        frame: format!("{base}/frame"),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CueView {
    #[serde(flatten)]
    pub cue: Cue,
    pub anchor: CueAnchor,
    pub issue_ids: Vec<String>,
    pub assets: AssetLinks,
}

async fn list_cues(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<Json<Vec<CueView>>> {
    let record = store.get(&id)?;
    let p = &record.project;
    let outcome = p.replay()?;
    let mut by_cue: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    for issue in &p.issues {
        by_cue.entry(issue.cue_id).or_default().push(issue.issue_id.clone());
    }
    let views = outcome
        .doc
        .cues
        .iter()
        .zip(&outcome.provenance)
        .map(|(cue, anchor)| CueView {
            cue: cue.clone(),
            anchor: *anchor,
            issue_ids: by_cue.get(&anchor.cue_id).cloned().unwrap_or_default(),
            assets: links(&p.project_id, anchor.cue_id),
        })
        .collect();
    Ok(Json(views))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IssueView {
    #[serde(flatten)]
    pub issue: Issue,
    /// Ids in the working document of the cues this issue now covers.
    pub current_cue_ids: Vec<u32>,
    pub original_lines: Vec<String>,
    pub current_cues: Vec<Cue>,
    pub decision: Option<ReviewDecision>,
    pub assets: AssetLinks,
}

fn issue_views(p: &Project, filter: impl Fn(&Issue, &[u32]) -> bool) -> ApiResult<Vec<IssueView>> {
    let outcome = p.replay()?;
    let effective = p.log.effective();
    let mut out = Vec::new();
    for issue in &p.issues {
        let ids = outcome.current_ids(issue.cue_id);
        if !filter(issue, &ids) {
            continue;
        }
        out.push(IssueView {
            current_cues: ids.iter().filter_map(|&i| outcome.doc.cue(i).cloned()).collect(),
            current_cue_ids: ids,
            original_lines: p.original_doc.cue(issue.cue_id).map(|c| c.lines.clone()).unwrap_or_default(),
            decision: effective.get(issue.issue_id.as_str()).map(|d| (*d).clone()),
            assets: links(&p.project_id, issue.cue_id),
            issue: issue.clone(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct IssueQuery {
    pub kind: Option<String>,
    pub cue: Option<u32>,
    pub offset: Option<usize>,
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IssuePage {
    pub total: usize,
    pub offset: usize,
    pub items: Vec<IssueView>,
}

async fn list_issues(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(q): Query<IssueQuery>,
) -> ApiResult<Json<IssuePage>> {
    let kind: Option<IssueKind> = match q.kind.as_deref().filter(|k| !k.is_empty()) {
        Some(k) => Some(k.parse().map_err(ApiError::validation)?),
        None => None,
    };
    let record = store.get(&id)?;
    let all = issue_views(&record.project, |issue, ids| {
        kind.is_none_or(|k| issue.kind == k) && q.cue.is_none_or(|c| ids.contains(&c))
    })?;
    let offset = q.offset.unwrap_or(0);
    let limit = q.limit.unwrap_or(usize::MAX);
    Ok(Json(IssuePage {
        total: all.len(),
        offset,
        items: all.into_iter().skip(offset).take(limit).collect(),
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionRequest {
    pub action: DecisionAction,
    #[serde(default)]
    pub payload: Option<Suggestion>,
}

async fn decide(
    State(store): State<Arc<Store>>,
    Path((id, iid)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<IssueView>> {
    let req: DecisionRequest = parse_body(&body)?;
    let decision = ReviewDecision {
        issue_id: iid.clone(),
        action: req.action,
        payload: req.payload,
        decided_at: now_ms(),
        actor: actor(&headers),
    };
    let (record, _) = store
        .update(&id, |r| r.project.decide(decision).map(|_| ()).map_err(ApiError::from))
        .await?;
    let view = issue_views(&record.project, |i, _| i.issue_id == iid)?
        .pop()
        .ok_or_else(|| ApiError::NotFound(format!("issue {iid}")))?;
    Ok(Json(view))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EditRequest {
    pub lines: Vec<String>,
}

async fn manual_edit(
    State(store): State<Arc<Store>>,
    Path((id, cid)): Path<(String, u32)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<Cue>> {
    let req: EditRequest = parse_body(&body)?;
    let who = actor(&headers);
    let (_, cue) = store
        .update(&id, |r| r.project.manual_edit(cid, req.lines, who, now_ms()).map_err(ApiError::from))
        .await?;
    Ok(Json(cue))
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct ExportQuery {
    pub format: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExportResponse {
    #[serde(flatten)]
    pub artifacts: FixArtifacts,
    pub log: DecisionLog,
}

async fn export(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(q): Query<ExportQuery>,
) -> ApiResult<Json<ExportResponse>> {
    let format = match q.format.as_deref().filter(|f| !f.is_empty()) {
        Some(f) => Some(
            f.parse::<SubtitleFormat>()
                .map_err(|_| ApiError::validation(format!("unknown export format {f:?}")))?,
        ),
        None => None,
    };
    let (record, artifacts) = store
        .update(&id, |r| r.project.export(format).map_err(ApiError::from))
        .await?;
    Ok(Json(ExportResponse {
        artifacts,
        log: record.project.log.clone(),
    }))
}

async fn asset(
    State(store): State<Arc<Store>>,
    Path((id, cue, kind)): Path<(String, u32, String)>,
    req: Request,
) -> ApiResult<Response> {
    let record = store.get(&id)?;
    if record.project.original_doc.cue(cue).is_none() {
        return Err(ApiError::NotFound(format!("cue {cue}")));
    }
    let (file, mime) = match kind.as_str() {
        "audio" => (AUDIO_FILE, "audio/wav"),
        "frame" => (FRAME_FILE, "image/x-portable-pixmap"),
        other => return Err(ApiError::NotFound(format!("asset {other:?}"))),
    };
    let root = record
        .assets
        .as_ref()
        .ok_or_else(|| ApiError::NotFound("assets for this project".into()))?;
    let path = root.join(cue.to_string()).join(file);
    if !path.is_file() {
        return Err(ApiError::NotFound(format!("{kind} for cue {cue}")));
    }
    let served = ServeFile::new_with_mime(path, &mime.parse().expect("static mime"))
        .oneshot(req)
        .await
        .map_err(|e| ApiError::Storage(e.to_string()))?;
    Ok(served.map(Body::new))
}
