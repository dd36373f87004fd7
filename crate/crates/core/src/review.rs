//! Annotator decisions over a report and their deterministic replay.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::fixes::{apply_fixes, AcceptedFix, CueAnchor, FixOutcome, FixPlan, ManualEditOp};
use crate::issue::{Issue, IssueKind, Suggestion};
use crate::pipeline::{render_fix, FixArtifacts, RunReport};
use crate::subtitle::{Cue, SubtitleDoc, SubtitleFormat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReviewError {
    #[error("unknown issue {0}")]
    UnknownIssue(String),
    #[error("unknown cue {0}")]
    UnknownCue(u32),
    #[error("an edit decision needs a payload")]
    MissingPayload,
    #[error("accept and reject decisions take no payload")]
    UnexpectedPayload,
    #[error("{kind} issues cannot take a {payload} payload")]
    PayloadKind { kind: IssueKind, payload: String },
    #[error("edited lines are empty")]
    EmptyLines,
    #[error("the change would leave the document invalid: {0}")]
    InvalidDocument(String),
    #[error("report does not match the subtitles: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionAction {
    Accept,
    Reject,
    Edit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewDecision {
    pub issue_id: String,
    pub action: DecisionAction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Suggestion>,
    /// Unix milliseconds.
    pub decided_at: u64,
    pub actor: String,
}

/// A free edit of a cue's text, anchored to the original cue so that it
/// survives later splits and renumbering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManualEdit {
    pub anchor: CueAnchor,
    /// Id the cue had in the working document when edited.
    pub cue_id: u32,
    pub old_lines: Vec<String>,
    pub new_lines: Vec<String>,
    pub edited_at: u64,
    pub actor: String,
}

fn payload_name(s: &Suggestion) -> &'static str {
    match s {
        Suggestion::ReplaceText { .. } => "text",
        Suggestion::MaskSpans { .. } => "mask",
        Suggestion::AppendTag { .. } => "tag",
        Suggestion::SplitCue { .. } => "split",
        Suggestion::MoveRegion { .. } => "region",
        Suggestion::SetColor { .. } => "color",
        Suggestion::None => "empty",
    }
}

/// Checks that a decision is well formed for the issue it targets.
pub fn validate_decision(
    issue: &Issue,
    action: DecisionAction,
    payload: Option<&Suggestion>,
) -> Result<(), ReviewError> {
    match (action, payload) {
        (DecisionAction::Edit, None) => Err(ReviewError::MissingPayload),
        (DecisionAction::Accept | DecisionAction::Reject, Some(_)) => Err(ReviewError::UnexpectedPayload),
        (DecisionAction::Edit, Some(p)) => {
            let ok = match issue.kind {
                k if k.accepts_text_edit() => p.is_text(),
                IssueKind::Segmentation => matches!(p, Suggestion::SplitCue { cues } if !cues.is_empty()),
                _ => p.is_placement(),
            };
            if !ok {
                return Err(ReviewError::PayloadKind {
                    kind: issue.kind,
                    payload: payload_name(p).into(),
                });
            }
            if let Suggestion::ReplaceText { lines } = p {
                if lines.iter().all(|l| l.trim().is_empty()) {
                    return Err(ReviewError::EmptyLines);
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Append-only record of everything an annotator did. Later decisions on an
/// issue override earlier ones; every manual edit is replayed in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecisionLog {
    pub decisions: Vec<ReviewDecision>,
    pub manual_edits: Vec<ManualEdit>,
}

impl DecisionLog {
    pub fn load(path: &std::path::Path) -> Result<Self, crate::pipeline::PipelineError> {
        crate::pipeline::read_json(path, "decision log")
    }

    /// Effective decision per issue id.
    pub fn effective(&self) -> BTreeMap<&str, &ReviewDecision> {
        let mut out = BTreeMap::new();
        for d in &self.decisions {
            out.insert(d.issue_id.as_str(), d);
        }
        out
    }

    pub fn plan(&self, issues: &[Issue]) -> Result<FixPlan, ReviewError> {
        let by_id: BTreeMap<&str, &Issue> = issues.iter().map(|i| (i.issue_id.as_str(), i)).collect();
        let mut accepted = Vec::new();
        for (id, d) in self.effective() {
            let issue = by_id.get(id).ok_or_else(|| ReviewError::UnknownIssue(id.to_string()))?;
            validate_decision(issue, d.action, d.payload.as_ref())?;
            match d.action {
                DecisionAction::Accept => accepted.push(AcceptedFix::from_issue(issue)),
                DecisionAction::Edit => accepted.push(AcceptedFix {
                    suggestion: d.payload.clone().expect("validated"),
                    ..AcceptedFix::from_issue(issue)
                }),
                DecisionAction::Reject => {}
            }
        }
        let manual = self
            .manual_edits
            .iter()
            .map(|m| ManualEditOp {
                anchor: m.anchor,
                lines: m.new_lines.clone(),
            })
            .collect();
        Ok(FixPlan { accepted, manual })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectStatus {
    Open,
    Exported,
}

/// A subtitle file under review together with its report and decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub project_id: String,
    pub video: Option<String>,
    /// File stem of the uploaded subtitles, used to name exports.
    pub name: String,
    pub original_doc: SubtitleDoc,
    /// Working copy: the original with the log replayed.
    pub doc: SubtitleDoc,
    pub issues: Vec<Issue>,
    pub log: DecisionLog,
    pub status: ProjectStatus,
    pub max_cpl: usize,
}

/// Stable project id derived from the uploaded content.
pub fn content_id(video: Option<&str>, name: &str, subtitles: &str, report: &RunReport) -> String {
    let mut h = Sha256::new();
    h.update(video.unwrap_or("").as_bytes());
    h.update([0]);
    h.update(name.as_bytes());
    h.update([0]);
    h.update(subtitles.as_bytes());
    h.update([0]);
    h.update(serde_json::to_string(&report.issues).expect("issues serialize").as_bytes());
    hex::encode(&h.finalize()[..8])
}

impl Project {
    pub fn new(
        video: Option<String>,
        name: &str,
        subtitles: &str,
        format: SubtitleFormat,
        report: &RunReport,
    ) -> Result<Self, ReviewError> {
        let doc = SubtitleDoc::parse(subtitles, format).map_err(|e| ReviewError::Mismatch(e.to_string()))?;
        report.check_against(&doc).map_err(|e| ReviewError::Mismatch(e.to_string()))?;
        Ok(Project {
            project_id: content_id(video.as_deref(), name, subtitles, report),
            video,
            name: name.to_string(),
            doc: doc.clone(),
            original_doc: doc,
            issues: report.issues.clone(),
            log: DecisionLog::default(),
            status: ProjectStatus::Open,
            max_cpl: report.config.thresholds.cpl,
        })
    }

    pub fn issue(&self, issue_id: &str) -> Option<&Issue> {
        self.issues.iter().find(|i| i.issue_id == issue_id)
    }

    /// Replays the log over the original document.
    pub fn replay(&self) -> Result<FixOutcome, ReviewError> {
        Ok(apply_fixes(&self.original_doc, &self.log.plan(&self.issues)?, self.max_cpl))
    }

    fn commit(&mut self, log: DecisionLog) -> Result<FixOutcome, ReviewError> {
        let plan = log.plan(&self.issues)?;
        let outcome = apply_fixes(&self.original_doc, &plan, self.max_cpl);
        if !outcome.doc.is_valid() {
            return Err(ReviewError::InvalidDocument("cues overlap or are out of order".into()));
        }
        self.log = log;
        self.doc = outcome.doc.clone();
        self.status = ProjectStatus::Open;
        Ok(outcome)
    }

    pub fn decide(&mut self, decision: ReviewDecision) -> Result<FixOutcome, ReviewError> {
        let issue = self
            .issue(&decision.issue_id)
            .ok_or_else(|| ReviewError::UnknownIssue(decision.issue_id.clone()))?;
        validate_decision(issue, decision.action, decision.payload.as_ref())?;
        let mut log = self.log.clone();
        log.decisions.push(decision);
        self.commit(log)
    }

    /// Replaces the text of the working-document cue `cue_id`.
    pub fn manual_edit(
        &mut self,
        cue_id: u32,
        lines: Vec<String>,
        actor: String,
        edited_at: u64,
    ) -> Result<Cue, ReviewError> {
        let lines: Vec<String> = lines
            .iter()
            .flat_map(|l| l.split('\n'))
            .map(|l| l.trim_end_matches('\r').to_string())
            .filter(|l| !l.trim().is_empty())
            .collect();
        if lines.is_empty() {
            return Err(ReviewError::EmptyLines);
        }
        let current = self.replay()?;
        let index = current
            .doc
            .cues
            .iter()
            .position(|c| c.id == cue_id)
            .ok_or(ReviewError::UnknownCue(cue_id))?;
        let mut log = self.log.clone();
        log.manual_edits.push(ManualEdit {
            anchor: current.provenance[index],
            cue_id,
            old_lines: current.doc.cues[index].lines.clone(),
            new_lines: lines,
            edited_at,
            actor,
        });
        let outcome = self.commit(log)?;
        let id = outcome.current_id(current.provenance[index]).ok_or(ReviewError::UnknownCue(cue_id))?;
        Ok(outcome.doc.cue(id).expect("id from outcome").clone())
    }

    pub fn export(&mut self, format: Option<SubtitleFormat>) -> Result<FixArtifacts, ReviewError> {
        let plan = self.log.plan(&self.issues)?;
        let artifacts = render_fix(
            &self.original_doc,
            &plan,
            self.max_cpl,
            self.video.as_deref().map(std::path::Path::new),
            &self.name,
            format,
        );
        self.status = ProjectStatus::Exported;
        Ok(artifacts)
    }
}
