use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::asr::read_asset_json;
use super::http::{HttpConfig, HttpTransport};
use super::{BackendError, EventScore, LabelTable};
use crate::media::{wav, AudioClip, EVENTS_FILE};

pub trait AudioEventClassifier: Send + Sync {
    /// Clip-level scores sorted by score descending.
    fn classify(&self, clip: &AudioClip) -> Result<Vec<EventScore>, BackendError>;
}

/// Validates per-window scores and max-pools them into clip-level scores,
/// sorted by score descending then label.
pub fn max_pool(table: &LabelTable, windows: Vec<EventScore>) -> Result<Vec<EventScore>, BackendError> {
    let mut best: BTreeMap<String, f64> = BTreeMap::new();
    for e in windows {
        if !table.contains(&e.label) {
            return Err(BackendError::UnknownLabel(e.label));
        }
        if !(0.0..=1.0).contains(&e.score) {
            return Err(BackendError::ScoreRange { label: e.label, score: e.score });
        }
        let slot = best.entry(e.label).or_insert(e.score);
        *slot = slot.max(e.score);
    }
    let mut scores: Vec<EventScore> =
        best.into_iter().map(|(label, score)| EventScore { label, score }).collect();
    scores.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.label.cmp(&b.label)));
    Ok(scores)
}

/// Reads `<root>/<cue_id>/events.json`: a list of `{label, score}` entries,
/// one per analysis window and label.
#[derive(Debug, Clone)]
pub struct AssetEventClassifier {
    root: PathBuf,
    table: LabelTable,
}

impl AssetEventClassifier {
    pub fn new(root: impl AsRef<Path>, table: LabelTable) -> Self {
        AssetEventClassifier {
            root: root.as_ref().to_path_buf(),
            table,
        }
    }
}

impl AudioEventClassifier for AssetEventClassifier {
    fn classify(&self, clip: &AudioClip) -> Result<Vec<EventScore>, BackendError> {
        let path = self.root.join(clip.cue_id.to_string()).join(EVENTS_FILE);
        max_pool(&self.table, read_asset_json(&path)?)
    }
}

/// Posts the clip to `<base_url>/classify`; the reply uses the
/// `events.json` schema.
#[derive(Debug)]
pub struct HttpEventClassifier {
    transport: HttpTransport,
    table: LabelTable,
}

impl HttpEventClassifier {
    pub fn new(config: HttpConfig, table: LabelTable) -> Result<Self, BackendError> {
        Ok(HttpEventClassifier {
            transport: HttpTransport::new(config)?,
            table,
        })
    }
}

impl AudioEventClassifier for HttpEventClassifier {
    fn classify(&self, clip: &AudioClip) -> Result<Vec<EventScore>, BackendError> {
        let url = self.transport.url("classify");
        let body = wav::encode(&clip.samples);
        let text = self.transport.send(|c| {
            c.post(&url)
                .header("content-type", "audio/wav")
                .body(body.clone())
        })?;
        let windows: Vec<EventScore> = serde_json::from_str(&text).map_err(|e| BackendError::Malformed {
            file: "classify response".into(),
            message: e.to_string(),
        })?;
        max_pool(&self.table, windows)
    }
}
