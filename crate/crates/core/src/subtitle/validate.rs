use serde::{Deserialize, Serialize};

use super::SubtitleDoc;

/// Cues shorter than this are reported as too short.
pub const MIN_CUE_MS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    Overlap { first: u32, second: u32 },
    ZeroLength { cue: u32 },
    TooShort { cue: u32, duration_ms: u64 },
    OutOfOrder { cue: u32 },
    BeyondDuration { cue: u32, end_ms: u64, duration_ms: u64 },
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Finding::Overlap { first, second } => write!(f, "cue {first} overlaps cue {second}"),
            Finding::ZeroLength { cue } => write!(f, "cue {cue} has zero length"),
            Finding::TooShort { cue, duration_ms } => write!(f, "cue {cue} lasts only {duration_ms} ms"),
            Finding::OutOfOrder { cue } => write!(f, "cue {cue} starts before its predecessor"),
            Finding::BeyondDuration { cue, end_ms, duration_ms } => {
                write!(f, "cue {cue} ends at {end_ms} ms, after the media ends at {duration_ms} ms")
            }
        }
    }
}

pub fn validate(doc: &SubtitleDoc) -> Vec<Finding> {
    validate_with_duration(doc, None)
}

/// Structural checks; `media_duration_ms` additionally bounds cue ends.
pub fn validate_with_duration(doc: &SubtitleDoc, media_duration_ms: Option<u64>) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (i, cue) in doc.cues.iter().enumerate() {
        let duration = cue.end.ms().saturating_sub(cue.start.ms());
        if duration == 0 {
            findings.push(Finding::ZeroLength { cue: cue.id });
        } else if duration < MIN_CUE_MS {
            findings.push(Finding::TooShort {
                cue: cue.id,
                duration_ms: duration,
            });
        }
        if i > 0 {
            let prev = &doc.cues[i - 1];
            if cue.start < prev.start {
                findings.push(Finding::OutOfOrder { cue: cue.id });
            } else if cue.start < prev.end {
                findings.push(Finding::Overlap {
                    first: prev.id,
                    second: cue.id,
                });
            }
        }
        if let Some(limit) = media_duration_ms {
            if cue.end.ms() > limit {
                findings.push(Finding::BeyondDuration {
                    cue: cue.id,
                    end_ms: cue.end.ms(),
                    duration_ms: limit,
                });
            }
        }
    }
    findings
}
