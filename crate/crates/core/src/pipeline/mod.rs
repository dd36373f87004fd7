//! Command implementations: `check` runs detection, `fix` applies accepted
//! suggestions, `eval` scores documents.

mod check;
mod config;
mod eval;
mod fix;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use check::{cmd_check, CheckOutcome, RunReport, Timings, REPORT_FILE, TABLE_FILE};
pub use config::{AudioModelChoice, BackendConfig, DetectFlags, LlmChoice, RegionConfig, RunConfig, Thresholds};
pub use eval::{cmd_eval, EvalRequest};
pub use fix::{cmd_fix, mux_script, render_fix, FixArtifacts, FixSummary};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot read subtitles: {0}")]
    Subtitle(#[from] crate::subtitle::SubtitleError),
    #[error(transparent)]
    Media(#[from] crate::media::MediaError),
    #[error(transparent)]
    Backend(#[from] crate::backends::BackendError),
    #[error("report does not match the subtitle file: {0}")]
    ReportMismatch(String),
    #[error("malformed {what}: {message}")]
    Malformed { what: String, message: String },
    #[error(transparent)]
    Metric(#[from] crate::eval::MetricError),
    #[error(transparent)]
    Review(#[from] crate::review::ReviewError),
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub(crate) fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| PipelineError::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| PipelineError::io(path, e))
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, PipelineError> {
    let bytes = std::fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| PipelineError::Malformed {
        what: format!("{what} {}", path.display()),
        message: e.to_string(),
    })
}

pub(crate) fn to_json_pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize") + "\n"
}
