use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{to_json_pretty, write_file, PipelineError, RunConfig, TOOL_VERSION};
use crate::image::run_image_pass;
use crate::issue::{Issue, Skip};
use crate::lang::{run_language_pass, PassOutput};
use crate::media::{extract_all, ExtractedMedia};
use crate::subtitle::{to_table, validate_with_duration, write_csv, SubtitleDoc};

pub const REPORT_FILE: &str = "report.json";
pub const TABLE_FILE: &str = "table.csv";

/// Wall-clock milliseconds per phase.
pub type Timings = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub config: RunConfig,
    pub issues: Vec<Issue>,
    pub skips: Vec<Skip>,
    pub warnings: Vec<String>,
    #[serde(default)]
    pub timings: Timings,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        to_json_pretty(self)
    }

    /// The report without timings, for byte comparison between runs.
    pub fn canonical_json(&self) -> String {
        RunReport {
            timings: Timings::new(),
            ..self.clone()
        }
        .to_json()
    }

    pub fn load(path: &std::path::Path) -> Result<Self, PipelineError> {
        super::read_json(path, "report")
    }

    /// Checks that every issue points at a cue of `doc` and that ids are
    /// unique.
    pub fn check_against(&self, doc: &SubtitleDoc) -> Result<(), PipelineError> {
        let mut seen = std::collections::HashSet::new();
        for issue in &self.issues {
            if doc.cue(issue.cue_id).is_none() {
                return Err(PipelineError::ReportMismatch(format!(
                    "issue {} references unknown cue {}",
                    issue.issue_id, issue.cue_id
                )));
            }
            if !seen.insert(issue.issue_id.as_str()) {
                return Err(PipelineError::ReportMismatch(format!("duplicate issue id {}", issue.issue_id)));
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct CheckOutcome {
    pub report: RunReport,
    pub report_path: std::path::PathBuf,
}

impl CheckOutcome {
    /// 0 when every detector ran, 2 when some were skipped.
    pub fn exit_code(&self) -> i32 {
        if self.report.skips.is_empty() {
            0
        } else {
            2
        }
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

/// Pre-processes the subtitles, runs both detection passes and writes
/// `report.json` and `table.csv` under the output directory.
pub fn cmd_check(config: &RunConfig) -> Result<CheckOutcome, PipelineError> {
    config.validate()?;
    let mut timings = Timings::new();
    let mut warnings = Vec::new();

    let t = Instant::now();
    let doc = SubtitleDoc::load(&config.subs)?;
    let mut table = Vec::new();
    write_csv(&to_table(&doc), &mut table).map_err(|e| PipelineError::Malformed {
        what: "cue table".into(),
        message: e.to_string(),
    })?;
    write_file(&config.out.join(TABLE_FILE), table)?;
    timings.insert("preprocess".into(), elapsed_ms(t));

    let needs_media = config.needs_audio() || config.needs_frames();
    let t = Instant::now();
    let media = if needs_media {
        let source = config.media_source()?;
        match source.probe() {
            Ok(info) => warnings.extend(
                validate_with_duration(&doc, Some(info.duration_ms))
                    .into_iter()
                    .map(|f| format!("subtitles: {f}")),
            ),
            Err(e) => warnings.push(format!("media probe failed: {e}")),
        }
        extract_all(source.as_ref(), &doc.cues, config.parallelism, config.needs_audio(), config.needs_frames())
    } else {
        ExtractedMedia::default()
    };
    timings.insert("media".into(), elapsed_ms(t));

    let mut out = PassOutput::default();
    let t = Instant::now();
    if config.runs_language() {
        let backends = config.backends()?;
        out.extend(run_language_pass(&doc, &media.audio, &backends, &config.language(), config.parallelism));
    }
    timings.insert("language".into(), elapsed_ms(t));

    let t = Instant::now();
    if config.needs_frames() {
        out.extend(run_image_pass(&doc, &media.frames, &config.image(), config.parallelism));
    }
    timings.insert("image".into(), elapsed_ms(t));

    let out = out.finish();
    warnings.extend(out.warnings);
    let report = RunReport {
        tool_version: TOOL_VERSION.to_string(),
        config: config.clone(),
        issues: out.issues,
        skips: out.skips,
        warnings,
        timings,
    };
    let report_path = config.out.join(REPORT_FILE);
    write_file(&report_path, report.to_json())?;
    Ok(CheckOutcome { report, report_path })
}
