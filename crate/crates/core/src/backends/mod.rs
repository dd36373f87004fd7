//! Interfaces to the text LLM, speech recognizer and audio-event classifier,
//! each with a networked and a deterministic offline implementation.

mod asr;
mod events;
mod http;
mod labels;
mod llm;
pub mod prompts;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use asr::{normalize_words, AssetTranscriber, HttpTranscriber, Transcriber, Transcript};
pub use events::{max_pool, AssetEventClassifier, AudioEventClassifier, HttpEventClassifier};
pub use http::{HttpConfig, HttpLlm};
pub use labels::LabelTable;
pub use llm::{
    llm_complete, prompt_hash, CharSpan, HarmSpansResponse, LlmBackend, LlmRequest, LlmResponse,
    MockLlm, RawSpellFinding, ResponseSchema, SpellFindingsResponse, SpellFixResponse,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("http error: {0}")]
    Http(String),
    #[error("response does not match schema {schema}: {message}")]
    Schema { schema: String, message: String },
    #[error("no mock response for prompt hash {0}")]
    MissingMock(String),
    #[error("backend unavailable: {0}")]
    Unavailable(String),
    #[error("malformed {file}: {message}")]
    Malformed { file: String, message: String },
    #[error("unknown audio event label {0:?}")]
    UnknownLabel(String),
    #[error("score {score} for {label:?} is outside [0, 1]")]
    ScoreRange { label: String, score: f64 },
}

/// One recognized word; timestamps are relative to the clip start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptWord {
    pub text: String,
    pub start_ms: u64,
    pub end_ms: u64,
    #[serde(default = "one")]
    pub confidence: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventScore {
    pub label: String,
    pub score: f64,
}

/// Shareable handles to the three model capabilities.
#[derive(Clone)]
pub struct Backends {
    pub llm: Arc<dyn LlmBackend>,
    pub asr: Arc<dyn Transcriber>,
    pub events: Arc<dyn AudioEventClassifier>,
}

impl Backends {
    /// LLM that never reports anything; ASR and events read the asset
    /// directory.
    pub fn offline(assets: impl Into<std::path::PathBuf>) -> Self {
        let root = assets.into();
        Backends {
            llm: Arc::new(MockLlm::silent()),
            asr: Arc::new(AssetTranscriber::new(&root)),
            events: Arc::new(AssetEventClassifier::new(&root, LabelTable::builtin())),
        }
    }
}
