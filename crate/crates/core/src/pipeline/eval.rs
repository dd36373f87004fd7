use std::path::PathBuf;

use serde_json::{json, Value};

use super::{read_json, PipelineError, RunReport};
use crate::eval::{f1_by_kind, label_predictions, stage_report, suber, TruthLabel};
use crate::issue::IssueKind;
use crate::subtitle::SubtitleDoc;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalRequest {
    pub reference: PathBuf,
    pub hypothesis: PathBuf,
    /// Report whose suggestions are applied stage by stage to the hypothesis.
    pub stages: Option<PathBuf>,
    /// Ground-truth labels scored against the issues of `report`.
    pub labels: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub max_cpl: usize,
}

/// Scores a hypothesis against a reference and returns the metrics as JSON.
pub fn cmd_eval(req: &EvalRequest) -> Result<Value, PipelineError> {
    let reference = SubtitleDoc::load(&req.reference)?;
    let hyp = SubtitleDoc::load(&req.hypothesis)?;
    let mut out = json!({ "suber": suber(&hyp, &reference)? });
    let report = match req.report.as_ref().or(req.stages.as_ref()) {
        Some(path) => Some(RunReport::load(path)?),
        None => None,
    };
    if let (Some(_), Some(report)) = (&req.stages, &report) {
        let rows = stage_report(&hyp, &reference, &report.issues, &IssueKind::LANGUAGE, req.max_cpl)?;
        out["stages"] = serde_json::to_value(rows).expect("rows serialize");
    }
    if let Some(path) = &req.labels {
        let report = report.as_ref().ok_or_else(|| PipelineError::Config("labels need a report to score".into()))?;
        let truth: Vec<TruthLabel> = read_json(path, "labels")?;
        let scores = f1_by_kind(&label_predictions(&truth, &report.issues));
        out["f1"] = serde_json::to_value(scores).expect("scores serialize");
    }
    Ok(out)
}
