use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{BackendError, LlmBackend, LlmRequest};

pub const MAX_ATTEMPTS: u32 = 3;

/// Connection settings shared by the networked backends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpConfig {
    pub base_url: String,
    pub model: String,
    #[serde(skip_serializing)]
    pub api_key: String,
    pub timeout_ms: u64,
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_in_flight: usize,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            base_url: String::new(),
            model: String::new(),
            api_key: String::new(),
            timeout_ms: 30_000,
            max_attempts: MAX_ATTEMPTS,
            initial_backoff_ms: 500,
            max_in_flight: 4,
        }
    }
}

impl HttpConfig {
    /// Reads `VSAT_LLM_BASE_URL`, `VSAT_LLM_MODEL` and `VSAT_LLM_API_KEY`.
    pub fn llm_from_env() -> Result<Self, BackendError> {
        let var = |name: &str| {
            std::env::var(name).map_err(|_| BackendError::Unavailable(format!("{name} is not set")))
        };
        Ok(HttpConfig {
            base_url: var("VSAT_LLM_BASE_URL")?,
            model: var("VSAT_LLM_MODEL")?,
            api_key: std::env::var("VSAT_LLM_API_KEY").unwrap_or_default(),
            ..HttpConfig::default()
        })
    }
}

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
struct InFlight {
    limit: usize,
    used: Mutex<usize>,
    freed: Condvar,
}

struct Permit<'a>(&'a InFlight);

impl InFlight {
    fn new(limit: usize) -> Self {
        InFlight {
            limit: limit.max(1),
            used: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut used = self.used.lock().unwrap_or_else(|e| e.into_inner());
        while *used >= self.limit {
            used = self.freed.wait(used).unwrap_or_else(|e| e.into_inner());
        }
        *used += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut used = self.0.used.lock().unwrap_or_else(|e| e.into_inner());
        *used -= 1;
        self.0.freed.notify_one();
    }
}

/// Shared HTTP plumbing: per-attempt timeout, bounded attempts with
/// exponential backoff, and an in-flight limit.
#[derive(Debug)]
pub(crate) struct HttpTransport {
    client: reqwest::blocking::Client,
    config: HttpConfig,
    in_flight: InFlight,
}

impl HttpTransport {
    pub(crate) fn new(config: HttpConfig) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_millis(config.timeout_ms))
            .build()
            .map_err(|e| BackendError::Unavailable(e.to_string()))?;
        Ok(HttpTransport {
            client,
            in_flight: InFlight::new(config.max_in_flight),
            config,
        })
    }

    pub(crate) fn url(&self, path: &str) -> String {
        format!("{}/{}", self.config.base_url.trim_end_matches('/'), path.trim_start_matches('/'))
    }

    pub(crate) fn config(&self) -> &HttpConfig {
        &self.config
    }

    /// Sends the request built by `build`, retrying transport failures and
    /// 429/5xx responses.
    pub(crate) fn send(
        &self,
        build: impl Fn(&reqwest::blocking::Client) -> reqwest::blocking::RequestBuilder,
    ) -> Result<String, BackendError> {
        let _permit = self.in_flight.acquire();
        let attempts = self.config.max_attempts.clamp(1, MAX_ATTEMPTS);
        let mut backoff = Duration::from_millis(self.config.initial_backoff_ms);
        let mut last = String::new();
        for attempt in 1..=attempts {
            let mut req = build(&self.client);
            if !self.config.api_key.is_empty() {
                req = req.bearer_auth(&self.config.api_key);
            }
            match req.send() {
                Ok(resp) => {
                    let status = resp.status();
                    let body = resp.text().unwrap_or_default();
                    if status.is_success() {
                        return Ok(body);
                    }
                    last = format!("status {status}: {}", body.chars().take(200).collect::<String>());
                    let retryable = status.as_u16() == 429 || status.is_server_error();
                    if !retryable {
                        break;
                    }
                }
                Err(e) => last = e.to_string(),
            }
            if attempt < attempts {
                std::thread::sleep(backoff);
                backoff *= 2;
            }
        }
        Err(BackendError::Http(last))
    }
}

/// Chat-completion client for any OpenAI-style `/chat/completions` endpoint.
#[derive(Debug)]
pub struct HttpLlm {
    transport: HttpTransport,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: Option<String>,
}

impl HttpLlm {
    pub fn new(config: HttpConfig) -> Result<Self, BackendError> {
        Ok(HttpLlm {
            transport: HttpTransport::new(config)?,
        })
    }

    pub fn request_body(&self, req: &LlmRequest) -> serde_json::Value {
        json!({
            "model": self.transport.config().model,
            "messages": [
                { "role": "system", "content": req.system_prompt },
                { "role": "user", "content": req.user_prompt },
            ],
            "temperature": req.temperature,
            "response_format": { "type": "json_object" },
        })
    }
}

impl LlmBackend for HttpLlm {
    fn chat(&self, req: &LlmRequest) -> Result<String, BackendError> {
        let url = self.transport.url("chat/completions");
        let body = self.request_body(req);
        let text = self.transport.send(|c| c.post(&url).json(&body))?;
        let parsed: ChatResponse =
            serde_json::from_str(&text).map_err(|e| BackendError::Http(format!("bad completion body: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| BackendError::Http("completion has no message content".into()))
    }
}
