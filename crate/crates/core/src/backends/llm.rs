use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::BackendError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ResponseSchema {
    SpellFindings,
    SpellFix,
    HarmSpans,
}

impl ResponseSchema {
    pub fn id(self) -> &'static str {
        match self {
            ResponseSchema::SpellFindings => "SPELL_FINDINGS",
            ResponseSchema::SpellFix => "SPELL_FIX",
            ResponseSchema::HarmSpans => "HARM_SPANS",
        }
    }

    fn empty(self) -> serde_json::Value {
        match self {
            ResponseSchema::SpellFindings => serde_json::json!({ "findings": [] }),
            ResponseSchema::SpellFix => serde_json::json!({ "candidates": [] }),
            ResponseSchema::HarmSpans => serde_json::json!({ "spans": [] }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub system_prompt: String,
    pub user_prompt: String,
    pub response_schema_id: ResponseSchema,
    pub temperature: f64,
}

impl LlmRequest {
    pub fn new(system: impl Into<String>, user: impl Into<String>, schema: ResponseSchema) -> Self {
        LlmRequest {
            system_prompt: system.into(),
            user_prompt: user.into(),
            response_schema_id: schema,
            temperature: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSpellFinding {
    pub word: String,
    pub start: usize,
    pub end: usize,
    #[serde(default)]
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpellFindingsResponse {
    pub findings: Vec<RawSpellFinding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpellFixResponse {
    pub candidates: Vec<String>,
}

/// Half-open character range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmSpansResponse {
    pub spans: Vec<CharSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LlmResponse {
    SpellFindings(SpellFindingsResponse),
    SpellFix(SpellFixResponse),
    HarmSpans(HarmSpansResponse),
}

impl LlmResponse {
    /// Parses and validates raw model output against `schema`.
    pub fn parse(schema: ResponseSchema, raw: &str) -> Result<Self, BackendError> {
        let err = |message: String| BackendError::Schema {
            schema: schema.id().to_string(),
            message,
        };
        let raw = strip_code_fence(raw);
        let parsed = match schema {
            ResponseSchema::SpellFindings => {
                let r: SpellFindingsResponse =
                    serde_json::from_str(raw).map_err(|e| err(e.to_string()))?;
                if let Some(f) = r.findings.iter().find(|f| f.start >= f.end) {
                    return Err(err(format!("empty span for {:?}", f.word)));
                }
                LlmResponse::SpellFindings(r)
            }
            ResponseSchema::SpellFix => {
                let r: SpellFixResponse = serde_json::from_str(raw).map_err(|e| err(e.to_string()))?;
                LlmResponse::SpellFix(r)
            }
            ResponseSchema::HarmSpans => {
                let r: HarmSpansResponse =
                    serde_json::from_str(raw).map_err(|e| err(e.to_string()))?;
                if let Some(s) = r.spans.iter().find(|s| s.start >= s.end) {
                    return Err(err(format!("empty span {s:?}")));
                }
                LlmResponse::HarmSpans(r)
            }
        };
        Ok(parsed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("responses serialize")
    }
}

fn strip_code_fence(raw: &str) -> &str {
    let t = raw.trim();
    t.strip_prefix("```json")
        .or_else(|| t.strip_prefix("```"))
        .and_then(|r| r.strip_suffix("```"))
        .map(str::trim)
        .unwrap_or(t)
}

/// A chat-completion capable model returning raw message content.
pub trait LlmBackend: Send + Sync {
    fn chat(&self, req: &LlmRequest) -> Result<String, BackendError>;
}

/// Sends `req`, validates the reply against its schema and retries once on a
/// schema violation.
pub fn llm_complete(backend: &dyn LlmBackend, req: &LlmRequest) -> Result<LlmResponse, BackendError> {
    let raw = backend.chat(req)?;
    match LlmResponse::parse(req.response_schema_id, &raw) {
        Ok(r) => Ok(r),
        Err(BackendError::Schema { .. }) => {
            let raw = backend.chat(req)?;
            LlmResponse::parse(req.response_schema_id, &raw)
        }
        Err(e) => Err(e),
    }
}

/// SHA-256 over schema id, system prompt and user prompt.
pub fn prompt_hash(req: &LlmRequest) -> String {
    let mut h = Sha256::new();
    h.update(req.response_schema_id.id().as_bytes());
    h.update([0]);
    h.update(req.system_prompt.as_bytes());
    h.update([0]);
    h.update(req.user_prompt.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct MockFile {
    #[serde(default)]
    fallback_empty: bool,
    #[serde(default)]
    entries: BTreeMap<String, serde_json::Value>,
}

/// Table-driven offline LLM keyed by [`prompt_hash`].
#[derive(Debug, Default)]
pub struct MockLlm {
    entries: BTreeMap<String, serde_json::Value>,
    fallback_empty: bool,
    calls: AtomicUsize,
}

impl MockLlm {
    pub fn new() -> Self {
        Self::default()
    }

    /// Answers every prompt with the schema's empty response.
    pub fn silent() -> Self {
        MockLlm {
            fallback_empty: true,
            ..Self::default()
        }
    }

    pub fn with_fallback_empty(mut self, yes: bool) -> Self {
        self.fallback_empty = yes;
        self
    }

    pub fn insert(&mut self, req: &LlmRequest, response: serde_json::Value) {
        self.entries.insert(prompt_hash(req), response);
    }

    pub fn insert_hash(&mut self, hash: impl Into<String>, response: serde_json::Value) {
        self.entries.insert(hash.into(), response);
    }

    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let bytes = std::fs::read(path).map_err(|e| BackendError::Malformed {
            file: path.display().to_string(),
            message: e.to_string(),
        })?;
        let file: MockFile = serde_json::from_slice(&bytes).map_err(|e| BackendError::Malformed {
            file: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(MockLlm {
            entries: file.entries,
            fallback_empty: file.fallback_empty,
            calls: AtomicUsize::new(0),
        })
    }

    pub fn to_json(&self) -> String {
        let file = MockFile {
            fallback_empty: self.fallback_empty,
            entries: self.entries.clone(),
        };
        serde_json::to_string_pretty(&file).expect("mock table serializes")
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl LlmBackend for MockLlm {
    fn chat(&self, req: &LlmRequest) -> Result<String, BackendError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let hash = prompt_hash(req);
        match self.entries.get(&hash) {
            // String entries are returned verbatim so malformed output can be
            // simulated.
            Some(serde_json::Value::String(raw)) => Ok(raw.clone()),
            Some(value) => Ok(value.to_string()),
            None if self.fallback_empty => Ok(req.response_schema_id.empty().to_string()),
            None => Err(BackendError::MissingMock(hash)),
        }
    }
}
