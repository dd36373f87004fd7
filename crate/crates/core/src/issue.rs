//! Detected issues and the machine-applicable suggestions attached to them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backends::{CharSpan, EventScore};
use crate::region::Region;
use crate::subtitle::Cue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IssueKind {
    ContextualSpelling,
    HarmfulWord,
    TimeSync,
    NonWord,
    Segmentation,
    Positioning,
    FontColor,
}

impl IssueKind {
    pub const ALL: [IssueKind; 7] = [
        IssueKind::ContextualSpelling,
        IssueKind::HarmfulWord,
        IssueKind::TimeSync,
        IssueKind::NonWord,
        IssueKind::Segmentation,
        IssueKind::Positioning,
        IssueKind::FontColor,
    ];

    pub const LANGUAGE: [IssueKind; 5] = [
        IssueKind::ContextualSpelling,
        IssueKind::HarmfulWord,
        IssueKind::TimeSync,
        IssueKind::NonWord,
        IssueKind::Segmentation,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            IssueKind::ContextualSpelling => "spelling",
            IssueKind::HarmfulWord => "harmful",
            IssueKind::TimeSync => "timesync",
            IssueKind::NonWord => "nonword",
            IssueKind::Segmentation => "segmentation",
            IssueKind::Positioning => "positioning",
            IssueKind::FontColor => "fontcolor",
        }
    }

    /// 1-based issue number in the order the detectors are described.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn is_language(self) -> bool {
        self.number() <= 5
    }

    /// Kinds whose suggestion an annotator may replace with free text.
    pub fn accepts_text_edit(self) -> bool {
        self.number() <= 4
    }
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for IssueKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IssueKind::ALL
            .into_iter()
            .find(|k| k.slug().eq_ignore_ascii_case(s) || format!("{k:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown issue kind {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FontColor {
    Black,
    White,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Suggestion {
    ReplaceText { lines: Vec<String> },
    /// `originals` holds the text under each span at detection time.
    MaskSpans { spans: Vec<CharSpan>, originals: Vec<String> },
    AppendTag { label: String },
    SplitCue { cues: Vec<Cue> },
    MoveRegion { region: Region },
    SetColor { color: FontColor },
    None,
}

impl Suggestion {
    pub fn is_structural(&self) -> bool {
        matches!(self, Suggestion::SplitCue { .. })
    }

    pub fn is_placement(&self) -> bool {
        matches!(self, Suggestion::MoveRegion { .. } | Suggestion::SetColor { .. })
    }

    pub fn is_text(&self) -> bool {
        matches!(
            self,
            Suggestion::ReplaceText { .. } | Suggestion::MaskSpans { .. } | Suggestion::AppendTag { .. }
        )
    }
}

/// A word flagged as contextually wrong, with candidates that passed the
/// rule checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpellFinding {
    pub word: String,
    pub char_span: CharSpan,
    pub candidates: Vec<String>,
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub name: String,
    pub region: Region,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Evidence {
    ContextualSpelling {
        findings: Vec<SpellFinding>,
        /// Rule 2 (meaningful in context) is left to the model.
        rule2: String,
    },
    HarmfulWord {
        spans: Vec<CharSpan>,
    },
    TimeSync {
        similarity: f64,
        threshold: f64,
        cue_tokens: Vec<String>,
        transcript_tokens: Vec<String>,
    },
    NonWord {
        label: String,
        score: f64,
        threshold: f64,
        candidates: Vec<EventScore>,
    },
    Segmentation {
        max_line_chars: usize,
        max_cpl: usize,
        realigned: bool,
        warnings: Vec<String>,
    },
    Positioning {
        default_score: f64,
        threshold: f64,
        candidates: Vec<CandidateScore>,
        chosen: String,
    },
    FontColor {
        brightness: f64,
        current: FontColor,
        chosen: FontColor,
        region: Region,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub issue_id: String,
    pub cue_id: u32,
    pub kind: IssueKind,
    pub evidence: Evidence,
    pub suggestion: Suggestion,
}

impl Issue {
    pub fn new(cue_id: u32, kind: IssueKind, evidence: Evidence, suggestion: Suggestion) -> Self {
        Issue {
            issue_id: issue_id(cue_id, kind),
            cue_id,
            kind,
            evidence,
            suggestion,
        }
    }
}

pub fn issue_id(cue_id: u32, kind: IssueKind) -> String {
    format!("{cue_id:04}-{}", kind.slug())
}

/// A detector that could not run for one cue.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Skip {
    pub cue_id: u32,
    pub detector: String,
    pub reason: String,
}

impl Skip {
    pub fn new(cue_id: u32, kind: IssueKind, reason: impl Into<String>) -> Self {
        Skip {
            cue_id,
            detector: kind.slug().to_string(),
            reason: reason.into(),
        }
    }
}

/// Deterministic report order: by cue, then kind.
pub fn sort_issues(issues: &mut [Issue]) {
    issues.sort_by_key(|i| (i.cue_id, i.kind));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parsing_and_numbering() {
        assert_eq!("Segmentation".parse::<IssueKind>(), Ok(IssueKind::Segmentation));
        assert_eq!("fontcolor".parse::<IssueKind>(), Ok(IssueKind::FontColor));
        assert!("Spelling Bee".parse::<IssueKind>().is_err());
        assert_eq!(IssueKind::ContextualSpelling.number(), 1);
        assert_eq!(IssueKind::FontColor.number(), 7);
        assert!(IssueKind::NonWord.accepts_text_edit());
        assert!(!IssueKind::Segmentation.accepts_text_edit());
        assert!(!IssueKind::Positioning.is_language());
    }

    #[test]
    fn ids_are_sortable() {
        assert_eq!(issue_id(3, IssueKind::TimeSync), "0003-timesync");
    }
}
