//! Provider configuration and the `providers.toml` loader.
//!
//! ```toml
//! [chatgpt]
//! model_name = "gpt-4.1-mini"
//! timeout = 90
//!
//! [mock]
//! mock_latency = 0.2
//! mock_seed = 7
//!
//! # Any table name works when `provider` says which adapter to use.
//! [claude-haiku]
//! provider = "claude"
//! model_name = "claude-haiku-4-5"
//! ```
//!
//! Fields left out fall back to the built-in defaults for that provider.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Chatgpt,
    Claude,
    Gemini,
    Grok,
    Mock,
}

impl ProviderKind {
    pub const ALL: [ProviderKind; 5] = [
        ProviderKind::Chatgpt,
        ProviderKind::Claude,
        ProviderKind::Gemini,
        ProviderKind::Grok,
        ProviderKind::Mock,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProviderKind::Chatgpt => "chatgpt",
            ProviderKind::Claude => "claude",
            ProviderKind::Gemini => "gemini",
            ProviderKind::Grok => "grok",
            ProviderKind::Mock => "mock",
        }
    }

    /// Report heading for this provider.
    pub fn display_name(self) -> &'static str {
        match self {
            ProviderKind::Chatgpt => "ChatGPT",
            ProviderKind::Claude => "Claude",
            ProviderKind::Gemini => "Gemini",
            ProviderKind::Grok => "Grok",
            ProviderKind::Mock => "Mock",
        }
    }
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown provider {0:?} (expected chatgpt, claude, gemini, grok, or mock)")]
pub struct UnknownProvider(pub String);

impl FromStr for ProviderKind {
    type Err = UnknownProvider;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProviderKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownProvider(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub provider: ProviderKind,
    pub model_name: String,
    /// For Gemini, `{model}` is replaced by `model_name`.
    pub endpoint: String,
    /// Name of the environment variable holding the API key.
    pub api_key_ref: Option<String>,
    /// Seconds.
    pub timeout: f64,
    /// Mock only: simulated response time in seconds.
    pub mock_latency: Option<f64>,
    /// Mock only: planner seed.
    pub mock_seed: Option<u64>,
    /// Passed through when set; provider default otherwise.
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
}

pub const DEFAULT_TIMEOUT: f64 = 120.0;

impl ProviderConfig {
    pub fn default_for(provider: ProviderKind) -> Self {
        let (model, endpoint, key) = match provider {
            ProviderKind::Chatgpt => (
                "gpt-4.1-mini",
                "https://api.openai.com/v1/chat/completions",
                Some("OPENAI_API_KEY"),
            ),
            ProviderKind::Claude => (
                "claude-sonnet-4-5",
                "https://api.anthropic.com/v1/messages",
                Some("ANTHROPIC_API_KEY"),
            ),
            ProviderKind::Gemini => (
                "gemini-2.5-flash",
                "https://generativelanguage.googleapis.com/v1beta/models/{model}:generateContent",
                Some("GEMINI_API_KEY"),
            ),
            ProviderKind::Grok => (
                "grok-4-1-fast",
                "https://api.x.ai/v1/chat/completions",
                Some("XAI_API_KEY"),
            ),
            ProviderKind::Mock => ("mock-planner", "mock://local", None),
        };
        Self {
            provider,
            model_name: model.to_owned(),
            endpoint: endpoint.to_owned(),
            api_key_ref: key.map(str::to_owned),
            timeout: DEFAULT_TIMEOUT,
            mock_latency: None,
            mock_seed: None,
            temperature: None,
            max_tokens: None,
        }
    }

    pub fn mock(latency: f64, seed: u64) -> Self {
        Self {
            mock_latency: Some(latency),
            mock_seed: Some(seed),
            ..Self::default_for(ProviderKind::Mock)
        }
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(self.provider.to_string(), msg));
        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return fail(format!("timeout must be > 0 seconds, got {}", self.timeout));
        }
        if let Some(l) = self.mock_latency {
            if !(l.is_finite() && l >= 0.0) {
                return fail(format!("mock_latency must be >= 0 seconds, got {l}"));
            }
        }
        if self.provider != ProviderKind::Mock
            && self.api_key_ref.as_deref().is_none_or(str::is_empty)
        {
            return fail("api_key_ref is required".into());
        }
        if self.model_name.trim().is_empty() {
            return fail("model_name is empty".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed provider config: {0}")]
    Syntax(String),
    #[error("provider {0}: {1}")]
    Invalid(String, String),
    #[error("no provider named {0:?} in config")]
    Missing(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Overrides {
    provider: Option<ProviderKind>,
    model_name: Option<String>,
    endpoint: Option<String>,
    api_key_ref: Option<String>,
    timeout: Option<f64>,
    mock_latency: Option<f64>,
    mock_seed: Option<u64>,
    temperature: Option<f64>,
    max_tokens: Option<u32>,
}

impl Overrides {
    fn apply(self, base: ProviderConfig) -> ProviderConfig {
        ProviderConfig {
            provider: base.provider,
            model_name: self.model_name.unwrap_or(base.model_name),
            endpoint: self.endpoint.unwrap_or(base.endpoint),
            api_key_ref: self.api_key_ref.or(base.api_key_ref),
            timeout: self.timeout.unwrap_or(base.timeout),
            mock_latency: self.mock_latency.or(base.mock_latency),
            mock_seed: self.mock_seed.or(base.mock_seed),
            temperature: self.temperature.or(base.temperature),
            max_tokens: self.max_tokens.or(base.max_tokens),
        }
    }
}

/// Named provider configurations. The five built-in names are always present.
#[derive(Debug, Clone, PartialEq)]
pub struct ProviderSet {
    entries: BTreeMap<String, ProviderConfig>,
}

impl Default for ProviderSet {
    fn default() -> Self {
        let entries = ProviderKind::ALL
            .into_iter()
            .map(|k| (k.as_str().to_owned(), ProviderConfig::default_for(k)))
            .collect();
        Self { entries }
    }
}

impl ProviderSet {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let tables: BTreeMap<String, Overrides> =
            toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let mut set = Self::default();
        for (name, overrides) in tables {
            let kind = match overrides.provider {
                Some(k) => k,
                None => name.parse().map_err(|e: UnknownProvider| {
                    ConfigError::Invalid(name.clone(), format!("{e}; set `provider`"))
                })?,
            };
            let config = overrides.apply(ProviderConfig::default_for(kind));
            config.check().map_err(|e| match e {
                ConfigError::Invalid(_, msg) => ConfigError::Invalid(name.clone(), msg),
                other => other,
            })?;
            set.entries.insert(name, config);
        }
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn get(&self, name: &str) -> Result<&ProviderConfig, ConfigError> {
        self.entries
            .get(name)
            .or_else(|| self.entries.get(&name.to_ascii_lowercase()))
            .ok_or_else(|| ConfigError::Missing(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_cover_every_provider() {
        let set = ProviderSet::default();
        assert_eq!(set.get("chatgpt").unwrap().model_name, "gpt-4.1-mini");
        assert_eq!(set.get("Claude").unwrap().provider, ProviderKind::Claude);
        assert_eq!(set.get("mock").unwrap().api_key_ref, None);
        for kind in ProviderKind::ALL {
            ProviderConfig::default_for(kind).check().unwrap();
        }
    }

    #[test]
    fn overrides_and_named_variants() {
        let set = ProviderSet::parse(
            r#"
            [mock]
            mock_latency = 0.25
            mock_seed = 9

            [fast-grok]
            provider = "grok"
            model_name = "grok-3-mini"
            timeout = 30
            "#,
        )
        .unwrap();
        let mock = set.get("mock").unwrap();
        assert_eq!((mock.mock_latency, mock.mock_seed), (Some(0.25), Some(9)));
        let grok = set.get("fast-grok").unwrap();
        assert_eq!(grok.provider, ProviderKind::Grok);
        assert_eq!(grok.api_key_ref.as_deref(), Some("XAI_API_KEY"));
        assert_eq!(grok.timeout, 30.0);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            ProviderSet::parse("[chatgpt]\ntimeout = 0\n"),
            Err(ConfigError::Invalid(..))
        ));
        assert!(matches!(
            ProviderSet::parse("[chatgpt]\napi_key_ref = \"\"\n"),
            Err(ConfigError::Invalid(..))
        ));
        assert!(matches!(
            ProviderSet::parse("[llama]\nmodel_name = \"x\"\n"),
            Err(ConfigError::Invalid(..))
        ));
        assert!(matches!(
            ProviderSet::parse("[mock]\nbogus = 1\n"),
            Err(ConfigError::Syntax(_))
        ));
    }
}
