use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::image::{
    average_brightness, default_ladder, detect_positioning, font_color_for, saliency_spectral_residual,
    NamedRegion, SaliencyMap, DEFAULT_BRIGHTNESS_THRESHOLD, DEFAULT_OVERLAP_THRESHOLD,
};
use crate::issue::{Evidence, FontColor, Issue, IssueKind, Skip, Suggestion};
use crate::lang::PassOutput;
use crate::media::Frame;
use crate::region::Region;
use crate::subtitle::{Cue, SubtitleDoc};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImageConfig {
    pub positioning: bool,
    pub font_color: bool,
    pub overlap_threshold: f64,
    pub brightness_threshold: f64,
    pub default_region: Region,
    pub ladder: Vec<NamedRegion>,
    /// Colour the subtitles are currently rendered in.
    pub current_color: FontColor,
}

impl Default for ImageConfig {
    fn default() -> Self {
        ImageConfig {
            positioning: true,
            font_color: true,
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
            brightness_threshold: DEFAULT_BRIGHTNESS_THRESHOLD,
            default_region: Region::default_band(),
            ladder: default_ladder(),
            current_color: FontColor::White,
        }
    }
}

fn run_cue(cue: &Cue, frame: &Frame, config: &ImageConfig) -> Vec<Issue> {
    let mut issues = Vec::new();
    let default = cue.position.unwrap_or(config.default_region);
    let mut region = default;
    if config.positioning {
        let map: SaliencyMap<f64> = saliency_spectral_residual(frame);
        let (_, issue) = detect_positioning(cue.id, &map, &default, &config.ladder, config.overlap_threshold);
        if let Some(issue) = issue {
            if let Suggestion::MoveRegion { region: moved } = issue.suggestion {
                region = moved;
            }
            issues.push(issue);
        }
    }
    if config.font_color {
        let brightness: f64 = average_brightness(frame, &region);
        let chosen = font_color_for(brightness, config.brightness_threshold);
        if chosen != config.current_color {
            issues.push(Issue::new(
                cue.id,
                IssueKind::FontColor,
                Evidence::FontColor {
                    brightness,
                    current: config.current_color,
                    chosen,
                    region,
                },
                Suggestion::SetColor { color: chosen },
            ));
        }
    }
    issues
}

/// Runs placement and contrast checks on the first frame of every cue.
pub fn run_image_pass(
    doc: &SubtitleDoc,
    frames: &BTreeMap<u32, Result<Frame, String>>,
    config: &ImageConfig,
    parallelism: usize,
) -> PassOutput {
    let kinds: Vec<IssueKind> = [
        (config.positioning, IssueKind::Positioning),
        (config.font_color, IssueKind::FontColor),
    ]
    .into_iter()
    .filter_map(|(on, k)| on.then_some(k))
    .collect();
    if kinds.is_empty() {
        return PassOutput::default();
    }
    let parts: Vec<PassOutput> = crate::pool::install(parallelism, || {
        doc.cues
            .par_iter()
            .map(|cue| match frames.get(&cue.id) {
                Some(Ok(frame)) => PassOutput {
                    issues: run_cue(cue, frame, config),
                    ..Default::default()
                },
                other => {
                    let reason = match other {
                        Some(Err(e)) => format!("frame unavailable: {e}"),
                        _ => "frame unavailable".to_string(),
                    };
                    PassOutput {
                        skips: kinds.iter().map(|&k| Skip::new(cue.id, k, reason.clone())).collect(),
                        ..Default::default()
                    }
                }
            })
            .collect()
    });
    let mut out = PassOutput::default();
    for p in parts {
        out.extend(p);
    }
    out.finish()
}
