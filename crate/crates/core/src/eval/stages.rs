use serde::{Deserialize, Serialize};

use crate::eval::{suber, MetricError, SuberReport};
use crate::fixes::{apply_fixes, FixPlan};
use crate::issue::{Issue, IssueKind};
use crate::subtitle::SubtitleDoc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRow {
    pub stage: String,
    pub report: SuberReport,
}

fn stage_name(kinds: &[IssueKind]) -> String {
    let nums: Vec<String> = kinds.iter().map(|k| k.number().to_string()).collect();
    format!("issue_{}", nums.join("+"))
}

/// Scores the base document, then again after accepting every suggestion of
/// the first stage kind, the first two, and so on.
pub fn stage_report(
    base: &SubtitleDoc,
    reference: &SubtitleDoc,
    issues: &[Issue],
    stages: &[IssueKind],
    max_cpl: usize,
) -> Result<Vec<StageRow>, MetricError> {
    let mut rows = vec![StageRow {
        stage: "base".into(),
        report: suber(base, reference)?,
    }];
    for n in 1..=stages.len() {
        let kinds = &stages[..n];
        let plan = FixPlan::accept_all(issues.iter().filter(|i| kinds.contains(&i.kind)));
        let fixed = apply_fixes(base, &plan, max_cpl).doc;
        rows.push(StageRow {
            stage: stage_name(kinds),
            report: suber(&fixed, reference)?,
        });
    }
    Ok(rows)
}
