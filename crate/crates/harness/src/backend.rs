//! Chat-completion backends. The HTTP variant speaks the OpenAI-compatible
//! `/chat/completions` wire format; the scripted variants live in
//! [`crate::scripted`].

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    /// Per-query seed; scripted backends require it for determinism, and it
    /// is forwarded to HTTP backends that support a `seed` field.
    pub seed: Option<u64>,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            temperature: 1.1,
            top_p: 1.0,
            max_tokens: 128,
            seed: None,
        }
    }
}

impl SamplingParams {
    pub fn with_seed(&self, seed: u64) -> SamplingParams {
        SamplingParams {
            seed: Some(seed),
            ..self.clone()
        }
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("backend request failed after {retries} retries: {message}")]
    Failed { retries: u32, message: String },
}

/// A text-completion endpoint. Implementations must accept concurrent
/// in-flight requests.
pub trait LLMBackend: Send + Sync {
    fn complete(&self, prompt: &str, params: &SamplingParams) -> Result<String, BackendError>;
}

/// Client for any OpenAI-compatible chat-completions endpoint.
pub struct HttpBackend {
    base_url: String,
    model: String,
    api_key: Option<String>,
    retries: u32,
    client: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
    temperature: f64,
    top_p: f64,
    max_tokens: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Deserialize)]
struct ResponseMessage {
    content: Option<String>,
}

impl HttpBackend {
    /// `base_url` is the API base, e.g. `http://localhost:8000/v1`; requests
    /// go to `{base_url}/chat/completions`.
    pub fn new(base_url: &str, model: &str, api_key: Option<String>) -> HttpBackend {
        HttpBackend {
            base_url: base_url.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key,
            retries: 3,
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(120))
                .build()
                .expect("client construction cannot fail with static options"),
        }
    }

    pub fn with_retries(mut self, retries: u32) -> HttpBackend {
        self.retries = retries;
        self
    }

    fn request_once(&self, prompt: &str, params: &SamplingParams) -> Result<String, String> {
        let body = ChatRequest {
            model: &self.model,
            messages: vec![ChatMessage {
                role: "user",
                content: prompt,
            }],
            temperature: params.temperature,
            top_p: params.top_p,
            max_tokens: params.max_tokens,
            seed: params.seed,
        };
        let mut req = self
            .client
            .post(format!("{}/chat/completions", self.base_url))
            .json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| e.to_string())?;
        let status = resp.status();
        if !status.is_success() {
            let text = resp.text().unwrap_or_default();
            return Err(format!("HTTP {}: {}", status, truncate(&text, 300)));
        }
        let parsed: ChatResponse = resp.json().map_err(|e| e.to_string())?;
        parsed
            .choices
            .first()
            .and_then(|c| c.message.content.clone())
            .ok_or_else(|| "response contained no completion text".to_string())
    }
}

impl LLMBackend for HttpBackend {
    fn complete(&self, prompt: &str, params: &SamplingParams) -> Result<String, BackendError> {
        let mut last = String::new();
        for attempt in 0..=self.retries {
            match self.request_once(prompt, params) {
                Ok(text) => return Ok(text),
                Err(e) => {
                    last = e;
                    if attempt < self.retries {
                        let backoff = Duration::from_millis(250 * 4u64.pow(attempt));
                        log::warn!(
                            "backend attempt {} failed ({}); retrying in {:?}",
                            attempt + 1,
                            last,
                            backoff
                        );
                        std::thread::sleep(backoff);
                    }
                }
            }
        }
        Err(BackendError::Failed {
            retries: self.retries,
            message: last,
        })
    }
}

fn truncate(s: &str, limit: usize) -> &str {
    match s.char_indices().nth(limit) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}
