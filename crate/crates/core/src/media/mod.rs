//! Per-cue audio clips and first frames, from either a pre-extracted asset
//! directory or an external media processor driven by command templates.

mod external;
mod offline;
pub mod ppm;
pub mod wav;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subtitle::{Cue, Timecode};

pub use external::{CommandTemplate, ExternalMedia, MediaCommands};
pub use offline::OfflineAssets;

pub const AUDIO_FILE: &str = "audio.wav";
pub const FRAME_FILE: &str = "frame.ppm";
pub const TRANSCRIPT_FILE: &str = "transcript.json";
pub const EVENTS_FILE: &str = "events.json";
pub const MANIFEST_FILE: &str = "media.json";

#[derive(Debug, Error)]
pub enum MediaError {
    #[error("media file not found: {0}")]
    NotFound(PathBuf),
    #[error("asset missing: {0}")]
    AssetMissing(PathBuf),
    #[error("invalid media manifest: {0}")]
    Manifest(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("media tool exited with {status}: {stderr}")]
    Tool { status: String, stderr: String },
    #[error("wav: {0}")]
    Wav(#[from] wav::WavError),
    #[error("ppm: {0}")]
    Ppm(#[from] ppm::PpmError),
    #[error("io error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl MediaError {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        let path = path.into();
        if err.kind() == std::io::ErrorKind::NotFound {
            return MediaError::AssetMissing(path);
        }
        MediaError::Io {
            path,
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediaInfo {
    pub duration_ms: u64,
    pub width: u32,
    pub height: u32,
    pub fps: f64,
}

impl MediaInfo {
    pub fn validate(self) -> Result<Self, MediaError> {
        if self.duration_ms == 0 || self.width == 0 || self.height == 0 || !(self.fps > 0.0) {
            return Err(MediaError::Manifest(format!(
                "all fields must be positive: {self:?}"
            )));
        }
        Ok(self)
    }
}

/// Mono 16 kHz PCM-16 audio for one cue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioClip {
    pub cue_id: u32,
    pub sample_rate_hz: u32,
    pub channels: u16,
    pub samples: Vec<i16>,
}

impl AudioClip {
    pub fn from_wav(cue_id: u32, bytes: &[u8]) -> Result<Self, MediaError> {
        Ok(AudioClip {
            cue_id,
            sample_rate_hz: wav::CANONICAL_RATE,
            channels: 1,
            samples: wav::decode(bytes)?,
        })
    }

    pub fn duration_ms(&self) -> u64 {
        self.samples.len() as u64 * 1000 / u64::from(self.sample_rate_hz)
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Row-major 8-bit RGB frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub cue_id: u32,
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Frame {
    pub fn new(cue_id: u32, width: usize, height: usize, pixels: Vec<u8>) -> Option<Self> {
        (width > 0 && height > 0 && pixels.len() == width * height * 3).then_some(Frame {
            cue_id,
            width,
            height,
            pixels,
        })
    }

    pub fn filled(cue_id: u32, width: usize, height: usize, rgb: [u8; 3]) -> Self {
        let pixels = rgb.iter().copied().cycle().take(width * height * 3).collect();
        Frame {
            cue_id,
            width,
            height,
            pixels,
        }
    }

    pub fn from_ppm(cue_id: u32, bytes: &[u8]) -> Result<Self, MediaError> {
        let (width, height, pixels) = ppm::decode(bytes)?;
        Ok(Frame {
            cue_id,
            width,
            height,
            pixels,
        })
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        ppm::encode(self.width, self.height, &self.pixels)
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Paints the axis-aligned pixel rectangle `[x0,x1) × [y0,y1)`.
    pub fn fill_rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, rgb: [u8; 3]) {
        for y in y0..y1.min(self.height) {
            for x in x0..x1.min(self.width) {
                self.set_pixel(x, y, rgb);
            }
        }
    }
}

/// A provider of per-cue media.
pub trait MediaSource: Send + Sync {
    fn probe(&self) -> Result<MediaInfo, MediaError>;

    fn extract_audio_clip(&self, cue_id: u32, start: Timecode, end: Timecode)
        -> Result<AudioClip, MediaError>;

    fn extract_first_frame(&self, cue_id: u32, at: Timecode) -> Result<Frame, MediaError>;

    /// Directory holding per-cue assets, if the source has one.
    fn asset_dir(&self) -> Option<PathBuf> {
        None
    }
}

/// Extracted media for a batch of cues, keyed by cue id.
#[derive(Debug, Default)]
pub struct ExtractedMedia {
    pub audio: BTreeMap<u32, Result<AudioClip, String>>,
    pub frames: BTreeMap<u32, Result<Frame, String>>,
}

/// Extracts audio and first frames for every cue with at most `parallelism`
/// extractions in flight.
pub fn extract_all(
    source: &dyn MediaSource,
    cues: &[Cue],
    parallelism: usize,
    want_audio: bool,
    want_frames: bool,
) -> ExtractedMedia {
    use rayon::prelude::*;

    let run = || {
        cues.par_iter()
            .map(|cue| {
                let audio = want_audio.then(|| {
                    source
                        .extract_audio_clip(cue.id, cue.start, cue.end)
                        .map_err(|e| e.to_string())
                });
                let frame = want_frames.then(|| {
                    source
                        .extract_first_frame(cue.id, cue.start)
                        .map_err(|e| e.to_string())
                });
                (cue.id, audio, frame)
            })
            .collect::<Vec<_>>()
    };
    let results = crate::pool::install(parallelism, run);
    let mut out = ExtractedMedia::default();
    for (id, audio, frame) in results {
        if let Some(a) = audio {
            out.audio.insert(id, a);
        }
        if let Some(f) = frame {
            out.frames.insert(id, f);
        }
    }
    out
}
