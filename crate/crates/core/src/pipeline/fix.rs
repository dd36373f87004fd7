use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{to_json_pretty, write_file, PipelineError, RunConfig, RunReport};
use crate::fixes::{apply_fixes, FixConflict, FixPlan, Placement};
use crate::review::DecisionLog;
use crate::subtitle::{SubtitleDoc, SubtitleFormat};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixSummary {
    pub input_cues: usize,
    pub output_cues: usize,
    pub applied: usize,
    pub conflicts: Vec<FixConflict>,
}

/// Everything `fix` and the review export produce, as bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixArtifacts {
    pub subtitle_name: String,
    pub subtitle: String,
    pub placements_name: String,
    pub placements: Vec<Placement>,
    pub mux_name: String,
    pub mux_script: String,
    pub summary: FixSummary,
}

impl FixArtifacts {
    pub fn placements_json(&self) -> String {
        to_json_pretty(&self.placements)
    }

    /// Writes the three files into `dir` and returns the subtitle path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, PipelineError> {
        let path = dir.join(&self.subtitle_name);
        write_file(&path, &self.subtitle)?;
        write_file(&dir.join(&self.placements_name), self.placements_json())?;
        let mux = dir.join(&self.mux_name);
        write_file(&mux, &self.mux_script)?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            let _ = std::fs::set_permissions(&mux, std::fs::Permissions::from_mode(0o755));
        }
        Ok(path)
    }
}

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

/// Shell script attaching the subtitle file to the video as a soft track.
pub fn mux_script(video: Option<&Path>, subtitle_name: &str, format: SubtitleFormat, stem: &str) -> String {
    let video_line = match video {
        Some(v) => format!("VIDEO=\"${{1:-{}}}\"", v.display().to_string().replace('"', "\\\"")),
        None => "VIDEO=\"${1:?usage: $0 VIDEO [OUT]}\"".to_string(),
    };
    let codec = match format {
        SubtitleFormat::Srt => "srt",
        SubtitleFormat::Vtt => "webvtt",
    };
    format!(
        "#!/bin/sh\n\
         # Attaches the corrected subtitles as a subtitle track without re-encoding.\n\
         set -eu\n\
         {video_line}\n\
         OUT=\"${{2:-{stem}.subtitled.mkv}}\"\n\
         SUBS=\"$(dirname \"$0\")\"/{subs}\n\
         ffmpeg -nostdin -y -i \"$VIDEO\" -i \"$SUBS\" -map 0 -map 1 -c copy -c:s {codec} \"$OUT\"\n",
        subs = shell_quote(subtitle_name),
    )
}

/// Applies `plan` to `original` and renders the output files. `format`
/// overrides the input format.
pub fn render_fix(
    original: &SubtitleDoc,
    plan: &FixPlan,
    max_cpl: usize,
    video: Option<&Path>,
    stem: &str,
    format: Option<SubtitleFormat>,
) -> FixArtifacts {
    let target = format.unwrap_or(original.format);
    let mut base = original.clone();
    if target != base.format {
        base.format = target;
        if target == SubtitleFormat::Srt {
            base.header = None;
        }
    }
    let outcome = apply_fixes(&base, plan, max_cpl);
    let subtitle_name = format!("{stem}.fixed.{}", target.extension());
    FixArtifacts {
        mux_script: mux_script(video, &subtitle_name, target, stem),
        subtitle: outcome.doc.serialize(),
        subtitle_name,
        placements_name: format!("{stem}.placements.json"),
        placements: outcome.placements,
        mux_name: format!("{stem}.mux.sh"),
        summary: FixSummary {
            input_cues: original.cues.len(),
            output_cues: outcome.doc.cues.len(),
            applied: plan.accepted.len() + plan.manual.len(),
            conflicts: outcome.conflicts,
        },
    }
}

pub(crate) fn subtitle_stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .unwrap_or("subtitles")
        .to_string()
}

/// Applies every suggestion in `report`, or only those accepted in
/// `decisions`, and writes the results under the output directory.
pub fn cmd_fix(
    config: &RunConfig,
    report: &RunReport,
    decisions: Option<&DecisionLog>,
) -> Result<FixArtifacts, PipelineError> {
    config.validate()?;
    let doc = SubtitleDoc::load(&config.subs)?;
    report.check_against(&doc)?;
    let plan = match decisions {
        Some(log) => log.plan(&report.issues)?,
        None => FixPlan::accept_all(&report.issues),
    };
    let artifacts = render_fix(
        &doc,
        &plan,
        config.thresholds.cpl,
        config.video.as_deref(),
        &subtitle_stem(&config.subs),
        None,
    );
    artifacts.write(&config.out)?;
    write_file(&config.out.join("fix_summary.json"), to_json_pretty(&artifacts.summary))?;
    Ok(artifacts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_quotes_and_codec() {
        let s = mux_script(Some(Path::new("/v/my clip.mp4")), "it's.fixed.vtt", SubtitleFormat::Vtt, "it's");
        assert!(s.contains(r"'it'\''s.fixed.vtt'"));
        assert!(s.contains("-c:s webvtt"));
        assert!(s.contains("${1:-/v/my clip.mp4}"));
        let s = mux_script(None, "a.fixed.srt", SubtitleFormat::Srt, "a");
        assert!(s.contains("${1:?usage"));
        assert!(s.contains("-c:s srt"));
    }

    #[test]
    fn empty_plan_keeps_normalized_input() {
        let text = "1\n00:00:00,000 --> 00:00:01,000\nhi\n\n";
        let doc = SubtitleDoc::parse(text, SubtitleFormat::Srt).unwrap();
        let a = render_fix(&doc, &FixPlan::default(), 50, None, "x", None);
        assert_eq!(a.subtitle, text);
        assert_eq!(a.subtitle_name, "x.fixed.srt");
        assert!(a.placements.is_empty());
        let v = render_fix(&doc, &FixPlan::default(), 50, None, "x", Some(SubtitleFormat::Vtt));
        assert!(v.subtitle.starts_with("WEBVTT"));
        assert_eq!(v.subtitle_name, "x.fixed.vtt");
    }
}
