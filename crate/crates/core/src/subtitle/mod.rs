//! Subtitle documents: SRT and WebVTT parsing, serialization, tabulation and
//! structural validation.

mod srt;
mod table;
mod timecode;
mod validate;
mod vtt;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::region::Region;

pub use srt::{parse_srt, serialize_srt};
pub use table::{to_table, write_csv, CueTableRow};
pub use timecode::Timecode;
pub use validate::{validate, validate_with_duration, Finding};
pub use vtt::{parse_vtt, region_from_settings, serialize_vtt};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubtitleError {
    #[error("line {line}: malformed timecode line {text:?}")]
    Timecode { line: usize, text: String },
    #[error("line {line}: expected a timecode line, found {text:?}")]
    MissingTiming { line: usize, text: String },
    #[error("line {line}: start >= end at cue {cue}")]
    InvertedInterval { line: usize, cue: usize },
    #[error("line {line}: cue {cue} has no text")]
    EmptyCue { line: usize, cue: usize },
    #[error("missing WEBVTT header")]
    MissingMagic,
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("unsupported subtitle extension {0:?}")]
    UnknownFormat(String),
    #[error("io error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubtitleFormat {
    Srt,
    Vtt,
}

impl SubtitleFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SubtitleFormat::Srt => "srt",
            SubtitleFormat::Vtt => "vtt",
        }
    }

    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "srt" => Some(SubtitleFormat::Srt),
            "vtt" => Some(SubtitleFormat::Vtt),
            _ => None,
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, SubtitleError> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        Self::from_extension(ext).ok_or_else(|| SubtitleError::UnknownFormat(ext.to_string()))
    }
}

impl std::str::FromStr for SubtitleFormat {
    type Err = SubtitleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_extension(s).ok_or_else(|| SubtitleError::UnknownFormat(s.to_string()))
    }
}

/// One timed subtitle block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cue {
    pub id: u32,
    pub start: Timecode,
    pub end: Timecode,
    pub lines: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Region>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub settings: String,
}

impl Cue {
    pub fn new(id: u32, start_ms: u64, end_ms: u64, lines: Vec<String>) -> Self {
        Cue {
            id,
            start: Timecode(start_ms),
            end: Timecode(end_ms),
            lines,
            position: None,
            settings: String::new(),
        }
    }

    pub fn duration_ms(&self) -> u64 {
        self.end.0.saturating_sub(self.start.0)
    }

    /// Lines joined with `\n`; character spans in issues index into this.
    pub fn joined_text(&self) -> String {
        self.lines.join("\n")
    }

    pub fn space_joined(&self) -> String {
        self.lines.join(" ")
    }

    pub fn char_count(&self) -> usize {
        self.lines.iter().map(|l| l.chars().count()).sum()
    }

    pub fn max_line_chars(&self) -> usize {
        self.lines.iter().map(|l| l.chars().count()).max().unwrap_or(0)
    }

    pub fn is_well_formed(&self) -> bool {
        self.start < self.end
            && !self.lines.is_empty()
            && self.lines.iter().all(|l| !l.trim().is_empty() && !l.contains(['\n', '\r']))
    }

    /// Replaces the placement hint and rewrites the VTT settings to carry it.
    pub fn set_position(&mut self, region: Region) {
        self.settings = vtt::settings_with_region(&self.settings, &region);
        self.position = region_from_settings(&self.settings);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubtitleDoc {
    pub format: SubtitleFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header: Option<String>,
    pub cues: Vec<Cue>,
}

impl SubtitleDoc {
    pub fn new(format: SubtitleFormat, cues: Vec<Cue>) -> Self {
        SubtitleDoc {
            format,
            header: None,
            cues,
        }
    }

    pub fn parse(text: &str, format: SubtitleFormat) -> Result<Self, SubtitleError> {
        match format {
            SubtitleFormat::Srt => parse_srt(text),
            SubtitleFormat::Vtt => parse_vtt(text),
        }
    }

    /// Decodes raw bytes as UTF-8 (BOM tolerated) and parses them.
    pub fn parse_bytes(bytes: &[u8], format: SubtitleFormat) -> Result<Self, SubtitleError> {
        let text = std::str::from_utf8(bytes).map_err(|_| SubtitleError::Encoding)?;
        Self::parse(text, format)
    }

    pub fn load(path: &Path) -> Result<Self, SubtitleError> {
        let format = SubtitleFormat::from_path(path)?;
        let bytes =
            std::fs::read(path).map_err(|e| SubtitleError::Io(format!("{}: {e}", path.display())))?;
        Self::parse_bytes(&bytes, format)
    }

    pub fn serialize(&self) -> String {
        self.serialize_as(self.format)
    }

    pub fn serialize_as(&self, format: SubtitleFormat) -> String {
        match format {
            SubtitleFormat::Srt => serialize_srt(self),
            SubtitleFormat::Vtt => serialize_vtt(self),
        }
    }

    pub fn cue(&self, id: u32) -> Option<&Cue> {
        self.cues.iter().find(|c| c.id == id)
    }

    /// Sorts cues by start (stable) and assigns ids `1..=n`.
    pub fn renumber(&mut self) {
        self.cues.sort_by_key(|c| c.start);
        for (i, cue) in self.cues.iter_mut().enumerate() {
            cue.id = i as u32 + 1;
        }
    }

    /// Checks the document invariants: well-formed cues, sorted starts,
    /// unique ids.
    pub fn is_valid(&self) -> bool {
        let mut ids = std::collections::HashSet::new();
        self.cues.iter().all(|c| c.is_well_formed() && ids.insert(c.id))
            && self.cues.windows(2).all(|w| w[0].start <= w[1].start)
            && (self.format == SubtitleFormat::Vtt || self.header.is_none())
    }
}

/// Strips a UTF-8 BOM and normalizes line endings to `\n`.
pub(crate) fn normalized_lines(text: &str) -> Vec<&str> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect()
}
