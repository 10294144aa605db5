//! Chat providers: a deterministic in-process stub and an HTTP client for
//! chat-completion style endpoints.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::textprep::{Pipeline, PipelineConfig, Step};

/// Endpoint and request settings. An endpoint starting with `stub:` selects
/// the in-process stub.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub endpoint: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_in_flight: usize,
    pub retry_limit: u32,
    pub timeout_secs: f64,
    /// Delay before the n-th retry is `n * retry_backoff_ms`.
    pub retry_backoff_ms: u64,
    /// Header carrying the API key. `Authorization` gets a `Bearer` prefix.
    pub auth_header: String,
    /// Environment variable holding the API key.
    pub api_key_env: String,
    pub max_tokens: Option<u32>,
    pub extra_headers: BTreeMap<String, String>,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            endpoint: "stub:".into(),
            model_name: "stub".into(),
            temperature: 0.0,
            max_in_flight: 4,
            retry_limit: 3,
            timeout_secs: 60.0,
            retry_backoff_ms: 500,
            auth_header: "Authorization".into(),
            api_key_env: "LLM_API_KEY".into(),
            max_tokens: None,
            extra_headers: BTreeMap::new(),
        }
    }
}

impl ProviderConfig {
    pub fn stub() -> Self {
        ProviderConfig::default()
    }

    pub fn http(endpoint: impl Into<String>, model_name: impl Into<String>) -> Self {
        ProviderConfig {
            endpoint: endpoint.into(),
            model_name: model_name.into(),
            ..ProviderConfig::default()
        }
    }

    pub fn is_stub(&self) -> bool {
        self.endpoint.starts_with("stub:")
    }

    pub fn validate(&self) -> Result<()> {
        if self.temperature != 0.0 {
            return Err(Error::InvalidProvider(format!(
                "temperature must be 0, got {}",
                self.temperature
            )));
        }
        if self.max_in_flight == 0 {
            return Err(Error::InvalidProvider("max_in_flight must be positive".into()));
        }
        if self.model_name.trim().is_empty() {
            return Err(Error::InvalidProvider("model_name is empty".into()));
        }
        if !self.is_stub() && !self.endpoint.starts_with("http://") && !self.endpoint.starts_with("https://") {
            return Err(Error::InvalidProvider(format!("unsupported endpoint `{}`", self.endpoint)));
        }
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return Err(Error::InvalidProvider("timeout_secs must be positive".into()));
        }
        Ok(())
    }

    /// The provider this configuration describes.
    pub fn connect(&self) -> Result<Box<dyn ChatProvider>> {
        self.validate()?;
        if self.is_stub() {
            Ok(Box::new(StubProvider::new(&self.model_name)))
        } else {
            Ok(Box::new(HttpProvider::new(self.clone())?))
        }
    }
}

/// One chat request in, one completion text out. A single attempt; retries
/// are handled by the caller. `ProviderUnavailable` marks a retryable failure.
pub trait ChatProvider: Send + Sync {
    fn model(&self) -> &str;
    fn complete(&self, prompt: &str) -> Result<String>;
    /// Requests issued so far.
    fn requests(&self) -> usize;
}

/// Answers "Yes" exactly when the two entity texts in the prompt have equal
/// tokenised and normalised keys, "No" otherwise.
#[derive(Debug)]
pub struct StubProvider {
    model: String,
    pipeline: Pipeline,
    requests: AtomicUsize,
}

impl StubProvider {
    pub fn new(model: &str) -> Self {
        let config = PipelineConfig::new(vec![Step::Tokenise, Step::Normalise]).expect("valid");
        StubProvider {
            model: model.to_owned(),
            pipeline: Pipeline::new(config, None).expect("no lexicon needed"),
            requests: AtomicUsize::new(0),
        }
    }

    fn entities(prompt: &str) -> Option<(&str, &str)> {
        prompt.lines().find_map(|line| {
            let inner = line.strip_prefix("Is ")?.strip_suffix("? Answer yes or no.")?;
            inner.split_once(" equivalent to ")
        })
    }
}

impl ChatProvider for StubProvider {
    fn model(&self) -> &str {
        &self.model
    }

    fn complete(&self, prompt: &str) -> Result<String> {
        self.requests.fetch_add(1, Ordering::SeqCst);
        Ok(match Self::entities(prompt) {
            Some((a, b)) if self.pipeline.apply(a, None) == self.pipeline.apply(b, None) => {
                "Yes.".into()
            }
            Some(_) => "No.".into(),
            None => "I cannot tell from this prompt.".into(),
        })
    }

    fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

pub struct HttpProvider {
    config: ProviderConfig,
    agent: ureq::Agent,
    api_key: Option<String>,
    requests: AtomicUsize,
}

impl HttpProvider {
    pub fn new(config: ProviderConfig) -> Result<Self> {
        config.validate()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        Ok(HttpProvider { config, agent, api_key, requests: AtomicUsize::new(0) })
    }

    fn body(&self, prompt: &str) -> Value {
        let mut body = json!({
            "model": self.config.model_name,
            "temperature": 0,
            "messages": [{"role": "user", "content": prompt}],
        });
        if let Some(max) = self.config.max_tokens {
            body["max_tokens"] = json!(max);
        }
        body
    }
}

/// Completion text from the common response shapes (OpenAI-style `choices`,
/// Anthropic-style `content` blocks, Ollama-style `message`).
pub(crate) fn completion_text(response: &Value) -> Option<String> {
    if let Some(text) = response.pointer("/choices/0/message/content").and_then(Value::as_str) {
        return Some(text.to_owned());
    }
    if let Some(blocks) = response.get("content").and_then(Value::as_array) {
        let text: String = blocks.iter().filter_map(|b| b.get("text")?.as_str()).collect();
        if !text.is_empty() {
            return Some(text);
        }
    }
    if let Some(text) = response.pointer("/message/content").and_then(Value::as_str) {
        return Some(text.to_owned());
    }
    response.get("response").and_then(Value::as_str).map(str::to_owned)
}

impl ChatProvider for HttpProvider {
    fn model(&self) -> &str {
        &self.config.model_name
    }

    fn complete(&self, prompt: &str) -> Result<String> {
        self.requests.fetch_add(1, Ordering::SeqCst);
        let mut request = self.agent.post(&self.config.endpoint);
        if let Some(key) = &self.api_key {
            let value = if self.config.auth_header.eq_ignore_ascii_case("authorization") {
                format!("Bearer {key}")
            } else {
                key.clone()
            };
            request = request.header(self.config.auth_header.as_str(), value);
        }
        for (name, value) in &self.config.extra_headers {
            request = request.header(name.as_str(), value.as_str());
        }
        let unavailable = |message: String| Error::ProviderUnavailable { attempts: 1, message };
        let mut response =
            request.send_json(self.body(prompt)).map_err(|e| unavailable(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response.body_mut().read_to_string().map_err(|e| unavailable(e.to_string()))?;
        match status {
            200..=299 => {}
            429 => return Err(Error::QuotaExceeded(snippet(&text))),
            500..=599 => return Err(unavailable(format!("HTTP {status}: {}", snippet(&text)))),
            _ => {
                return Err(Error::InvalidProvider(format!("HTTP {status}: {}", snippet(&text))))
            }
        }
        let json: Value = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidProvider(format!("response is not JSON: {e}")))?;
        completion_text(&json)
            .ok_or_else(|| Error::InvalidProvider(format!("unrecognised response: {}", snippet(&text))))
    }

    fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

fn snippet(text: &str) -> String {
    text.chars().take(200).collect()
}
