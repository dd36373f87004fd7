use std::path::{Path, PathBuf};

use super::http::{HttpConfig, HttpTransport};
use super::{BackendError, TranscriptWord};
use crate::media::{wav, AudioClip, TRANSCRIPT_FILE};

/// Recognized words plus any normalization warnings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    pub words: Vec<TranscriptWord>,
    pub warnings: Vec<String>,
}

impl Transcript {
    pub fn text(&self) -> String {
        self.words.iter().map(|w| w.text.as_str()).collect::<Vec<_>>().join(" ")
    }
}

pub trait Transcriber: Send + Sync {
    fn transcribe(&self, clip: &AudioClip) -> Result<Transcript, BackendError>;
}

/// Sorts words by start and resolves overlaps by moving a later start up to
/// the previous end. Rejects inverted intervals and out-of-range confidences.
pub fn normalize_words(mut words: Vec<TranscriptWord>) -> Result<Transcript, BackendError> {
    let bad = |message: String| BackendError::Malformed {
        file: TRANSCRIPT_FILE.to_string(),
        message,
    };
    for w in &words {
        if w.start_ms >= w.end_ms {
            return Err(bad(format!("word {:?} has start >= end", w.text)));
        }
        if !(0.0..=1.0).contains(&w.confidence) {
            return Err(bad(format!("word {:?} has confidence {}", w.text, w.confidence)));
        }
    }
    words.sort_by_key(|w| (w.start_ms, w.end_ms));
    let mut warnings = Vec::new();
    for i in 1..words.len() {
        let prev_end = words[i - 1].end_ms;
        let w = &mut words[i];
        if w.start_ms < prev_end {
            warnings.push(format!(
                "word {:?} overlaps its predecessor; start moved {} -> {}",
                w.text, w.start_ms, prev_end
            ));
            w.start_ms = prev_end;
            if w.end_ms <= w.start_ms {
                w.end_ms = w.start_ms + 1;
            }
        }
    }
    Ok(Transcript { words, warnings })
}

/// Reads `<root>/<cue_id>/transcript.json`.
#[derive(Debug, Clone)]
pub struct AssetTranscriber {
    root: PathBuf,
}

impl AssetTranscriber {
    pub fn new(root: impl AsRef<Path>) -> Self {
        AssetTranscriber {
            root: root.as_ref().to_path_buf(),
        }
    }
}

pub(crate) fn read_asset_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, BackendError> {
    let bytes = std::fs::read(path).map_err(|e| BackendError::Unavailable(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| BackendError::Malformed {
        file: path.display().to_string(),
        message: e.to_string(),
    })
}

impl Transcriber for AssetTranscriber {
    fn transcribe(&self, clip: &AudioClip) -> Result<Transcript, BackendError> {
        if clip.is_empty() {
            return Ok(Transcript::default());
        }
        let path = self.root.join(clip.cue_id.to_string()).join(TRANSCRIPT_FILE);
        normalize_words(read_asset_json(&path)?)
    }
}

/// Posts the clip as WAV to `<base_url>/transcribe`; the reply uses the
/// `transcript.json` schema.
#[derive(Debug)]
pub struct HttpTranscriber {
    transport: HttpTransport,
}

impl HttpTranscriber {
    pub fn new(config: HttpConfig) -> Result<Self, BackendError> {
        Ok(HttpTranscriber {
            transport: HttpTransport::new(config)?,
        })
    }
}

impl Transcriber for HttpTranscriber {
    fn transcribe(&self, clip: &AudioClip) -> Result<Transcript, BackendError> {
        if clip.is_empty() {
            return Ok(Transcript::default());
        }
        let url = self.transport.url("transcribe");
        let body = wav::encode(&clip.samples);
        let text = self.transport.send(|c| {
            c.post(&url)
                .header("content-type", "audio/wav")
                .body(body.clone())
        })?;
        let words: Vec<TranscriptWord> = serde_json::from_str(&text).map_err(|e| BackendError::Malformed {
            file: "transcribe response".into(),
            message: e.to_string(),
        })?;
        normalize_words(words)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(text: &str, s: u64, e: u64) -> TranscriptWord {
        TranscriptWord { text: text.into(), start_ms: s, end_ms: e, confidence: 0.9 }
    }

    fn clip(cue_id: u32, n: usize) -> AudioClip {
        AudioClip { cue_id, sample_rate_hz: 16_000, channels: 1, samples: vec![0; n] }
    }

    #[test]
    fn reads_asset_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("1")).unwrap();
        std::fs::write(
            dir.path().join("1").join(TRANSCRIPT_FILE),
            r#"[{"text":"hello","start_ms":0,"end_ms":400,"confidence":0.99}]"#,
        )
        .unwrap();
        let asr = AssetTranscriber::new(dir.path());
        let t = asr.transcribe(&clip(1, 16_000)).unwrap();
        assert_eq!(t.words, vec![TranscriptWord { text: "hello".into(), start_ms: 0, end_ms: 400, confidence: 0.99 }]);
        assert_eq!(asr.transcribe(&clip(1, 16_000)).unwrap(), t);
    }

    #[test]
    fn empty_audio_is_empty_transcript() {
        let asr = AssetTranscriber::new("/nonexistent");
        assert!(asr.transcribe(&clip(9, 0)).unwrap().words.is_empty());
    }

    #[test]
    fn overlaps_are_normalized_with_warning() {
        let t = normalize_words(vec![word("b", 350, 700), word("a", 0, 400)]).unwrap();
        assert_eq!(t.words, vec![word("a", 0, 400), word("b", 400, 700)]);
        assert_eq!(t.warnings.len(), 1);
    }

    #[test]
    fn malformed_files() {
        assert!(normalize_words(vec![word("x", 10, 10)]).is_err());
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("1")).unwrap();
        std::fs::write(dir.path().join("1").join(TRANSCRIPT_FILE), "{not json").unwrap();
        let err = AssetTranscriber::new(dir.path()).transcribe(&clip(1, 10)).unwrap_err();
        assert!(matches!(err, BackendError::Malformed { .. }));
    }
}
