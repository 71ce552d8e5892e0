//! Prompt assembly and provider dispatch.
//!
//! [`Gateway::generate`] serializes the scene, pairs it with the bundled
//! system prompt, sends one request, and reports the reply with its
//! end-to-end latency: the clock starts just before the request is sent and
//! stops once the full response body has been read. There are no retries on
//! this path; [`Gateway::generate_with_retry`] exists for interactive use.

mod config;
mod mock;
mod prompt;
pub mod wire;

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::describe::serialize_scene;
use crate::scene::{validate_scene, Scene};

pub use config::{
    ConfigError, ProviderConfig, ProviderKind, ProviderSet, UnknownProvider, DEFAULT_TIMEOUT,
};
pub use mock::{mock_plan, mock_plan_struct};
pub use prompt::{build_prompt, SYSTEM_PROMPT, SYSTEM_PROMPT_VERSION};

/// Longest slice of a provider error body kept in [`GatewayError::Http`].
const EXCERPT_LEN: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub raw_text: String,
    /// Seconds.
    pub latency: f64,
    pub provider: ProviderKind,
    pub model_name: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{provider}: environment variable {var} is not set")]
    MissingCredential { provider: ProviderKind, var: String },
    #[error("scene cannot be sent: {0}")]
    Scene(String),
    #[error("{provider} returned HTTP {status}: {excerpt}")]
    Http {
        provider: ProviderKind,
        status: u16,
        excerpt: String,
    },
    #[error("{provider} did not answer within {seconds} s")]
    Timeout {
        provider: ProviderKind,
        seconds: f64,
    },
    #[error("{provider}: network error: {message}")]
    Network {
        provider: ProviderKind,
        message: String,
    },
    #[error("{provider}: unexpected response shape: {excerpt}")]
    MalformedResponse {
        provider: ProviderKind,
        excerpt: String,
    },
}

impl GatewayError {
    /// Worth another attempt: timeouts, connection failures, 429 and 5xx.
    pub fn is_transient(&self) -> bool {
        match self {
            GatewayError::Timeout { .. } | GatewayError::Network { .. } => true,
            GatewayError::Http { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

fn excerpt(text: &str) -> String {
    match text.char_indices().nth(EXCERPT_LEN) {
        Some((cut, _)) => format!("{}...", &text[..cut]),
        None => text.to_owned(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            backoff: Duration::from_millis(500),
        }
    }
}

pub struct Gateway {
    client: reqwest::blocking::Client,
    debug_log: Option<Mutex<File>>,
}

impl Gateway {
    pub fn new() -> Result<Self, GatewayError> {
        let client =
            reqwest::blocking::Client::builder()
                .build()
                .map_err(|e| GatewayError::Network {
                    provider: ProviderKind::Mock,
                    message: e.to_string(),
                })?;
        Ok(Self {
            client,
            debug_log: None,
        })
    }

    /// Appends request and response bodies to `path` as JSONL. Headers, and
    /// with them the API keys, are never written.
    pub fn with_debug_log(mut self, path: impl AsRef<Path>) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        self.debug_log = Some(Mutex::new(file));
        Ok(self)
    }

    fn log(&self, record: Value) {
        if let Some(log) = &self.debug_log {
            let mut file = log.lock().unwrap_or_else(|p| p.into_inner());
            if let Err(e) = writeln!(file, "{record}") {
                log::warn!("debug log write failed: {e}");
            }
        }
    }

    pub fn generate(
        &self,
        config: &ProviderConfig,
        scene: &Scene,
    ) -> Result<GenerationResult, GatewayError> {
        config.check()?;
        if let Some(v) = validate_scene(scene).into_iter().next() {
            return Err(GatewayError::Scene(v.to_string()));
        }
        if scene.is_empty() {
            return Err(GatewayError::Scene(
                "needs at least one agent and one object".into(),
            ));
        }
        if config.provider == ProviderKind::Mock {
            return Ok(self.generate_mock(config, scene));
        }

        let var = config.api_key_ref.as_deref().unwrap_or_default();
        let key = std::env::var(var)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| GatewayError::MissingCredential {
                provider: config.provider,
                var: var.to_owned(),
            })?;

        let description = serialize_scene(scene).map_err(|e| GatewayError::Scene(e.to_string()))?;
        let (system, user) = build_prompt(&description);
        let request = wire::build_request(config, &key, &system, &user);
        self.log(json!({
            "timestamp": Utc::now(),
            "direction": "request",
            "provider": config.provider,
            "url": request.url,
            "body": request.body,
        }));

        let mut builder = self
            .client
            .post(&request.url)
            .timeout(Duration::from_secs_f64(config.timeout))
            .json(&request.body);
        for (name, value) in &request.headers {
            builder = builder.header(name, value);
        }

        let provider = config.provider;
        let transport = |e: reqwest::Error| {
            if e.is_timeout() {
                GatewayError::Timeout {
                    provider,
                    seconds: config.timeout,
                }
            } else {
                GatewayError::Network {
                    provider,
                    message: e.to_string(),
                }
            }
        };

        let timestamp = Utc::now();
        let started = Instant::now();
        let response = builder.send().map_err(transport)?;
        let status = response.status();
        let body = response.text().map_err(transport)?;
        let latency = started.elapsed().as_secs_f64();

        self.log(json!({
            "timestamp": Utc::now(),
            "direction": "response",
            "provider": provider,
            "status": status.as_u16(),
            "latency_s": latency,
            "body": body,
        }));

        if !status.is_success() {
            return Err(GatewayError::Http {
                provider,
                status: status.as_u16(),
                excerpt: excerpt(&body),
            });
        }
        let raw_text = serde_json::from_str::<Value>(&body)
            .ok()
            .and_then(|v| wire::extract_text(provider, &v))
            .ok_or_else(|| GatewayError::MalformedResponse {
                provider,
                excerpt: excerpt(&body),
            })?;

        Ok(GenerationResult {
            raw_text,
            latency,
            provider,
            model_name: config.model_name.clone(),
            timestamp,
        })
    }

    fn generate_mock(&self, config: &ProviderConfig, scene: &Scene) -> GenerationResult {
        let timestamp = Utc::now();
        let started = Instant::now();
        if let Some(delay) = config.mock_latency.filter(|d| *d > 0.0) {
            thread::sleep(Duration::from_secs_f64(delay));
        }
        let raw_text = mock_plan(scene, config.mock_seed.unwrap_or(0));
        let latency = started.elapsed().as_secs_f64();
        self.log(json!({
            "timestamp": Utc::now(),
            "direction": "response",
            "provider": config.provider,
            "latency_s": latency,
            "body": raw_text,
        }));
        GenerationResult {
            raw_text,
            latency,
            provider: config.provider,
            model_name: config.model_name.clone(),
            timestamp,
        }
    }

    /// Retries transient failures with linear backoff. Not used for timing.
    pub fn generate_with_retry(
        &self,
        config: &ProviderConfig,
        scene: &Scene,
        policy: RetryPolicy,
    ) -> Result<GenerationResult, GatewayError> {
        let attempts = policy.attempts.max(1);
        let mut attempt = 1;
        loop {
            match self.generate(config, scene) {
                Err(e) if e.is_transient() && attempt < attempts => {
                    log::warn!("attempt {attempt}/{attempts} failed: {e}");
                    thread::sleep(policy.backoff * attempt);
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

/// One-off [`Gateway::generate`] with a fresh client.
pub fn generate(config: &ProviderConfig, scene: &Scene) -> Result<GenerationResult, GatewayError> {
    Gateway::new()?.generate(config, scene)
}
