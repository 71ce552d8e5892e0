//! Per-vendor request and response shapes.
//!
//! Every adapter takes a system message and a user message and returns the
//! reply text. OpenAI and xAI share the chat-completions shape.

use serde_json::{json, Map, Value};

use super::{ProviderConfig, ProviderKind};

/// Anthropic requires `max_tokens`; used when the config leaves it unset.
pub const ANTHROPIC_DEFAULT_MAX_TOKENS: u32 = 1024;
pub const ANTHROPIC_VERSION: &str = "2023-06-01";

#[derive(Debug, Clone, PartialEq)]
pub struct WireRequest {
    pub url: String,
    /// Includes the credential header. Never log these.
    pub headers: Vec<(String, String)>,
    pub body: Value,
}

fn insert_opt<T: Into<Value>>(map: &mut Map<String, Value>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        map.insert(key.to_owned(), v.into());
    }
}

pub fn build_request(
    config: &ProviderConfig,
    api_key: &str,
    system: &str,
    user: &str,
) -> WireRequest {
    let mut headers = vec![("content-type".to_owned(), "application/json".to_owned())];
    let (url, body) = match config.provider {
        ProviderKind::Chatgpt | ProviderKind::Grok | ProviderKind::Mock => {
            headers.push(("authorization".into(), format!("Bearer {api_key}")));
            let mut body = json!({
                "model": config.model_name,
                "messages": [
                    {"role": "system", "content": system},
                    {"role": "user", "content": user},
                ],
            });
            let map = body.as_object_mut().expect("object literal");
            insert_opt(map, "temperature", config.temperature);
            insert_opt(map, "max_tokens", config.max_tokens);
            (config.endpoint.clone(), body)
        }
        ProviderKind::Claude => {
            headers.push(("x-api-key".into(), api_key.to_owned()));
            headers.push(("anthropic-version".into(), ANTHROPIC_VERSION.into()));
            let mut body = json!({
                "model": config.model_name,
                "max_tokens": config.max_tokens.unwrap_or(ANTHROPIC_DEFAULT_MAX_TOKENS),
                "system": system,
                "messages": [{"role": "user", "content": user}],
            });
            let map = body.as_object_mut().expect("object literal");
            insert_opt(map, "temperature", config.temperature);
            (config.endpoint.clone(), body)
        }
        ProviderKind::Gemini => {
            headers.push(("x-goog-api-key".into(), api_key.to_owned()));
            let mut body = json!({
                "systemInstruction": {"parts": [{"text": system}]},
                "contents": [{"role": "user", "parts": [{"text": user}]}],
            });
            let mut generation = Map::new();
            insert_opt(&mut generation, "temperature", config.temperature);
            insert_opt(&mut generation, "maxOutputTokens", config.max_tokens);
            if !generation.is_empty() {
                body["generationConfig"] = Value::Object(generation);
            }
            (config.endpoint.replace("{model}", &config.model_name), body)
        }
    };
    WireRequest { url, headers, body }
}

fn concat_text<'a>(parts: impl Iterator<Item = &'a Value>) -> Option<String> {
    let mut out = String::new();
    let mut any = false;
    for part in parts {
        if let Some(t) = part.get("text").and_then(Value::as_str) {
            out.push_str(t);
            any = true;
        }
    }
    any.then_some(out)
}

/// Pulls the reply text out of a successful response body.
pub fn extract_text(provider: ProviderKind, body: &Value) -> Option<String> {
    match provider {
        ProviderKind::Chatgpt | ProviderKind::Grok | ProviderKind::Mock => body
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_owned),
        ProviderKind::Claude => {
            let blocks = body.get("content")?.as_array()?;
            concat_text(
                blocks
                    .iter()
                    .filter(|b| b.get("type").and_then(Value::as_str) == Some("text")),
            )
        }
        ProviderKind::Gemini => {
            let parts = body.pointer("/candidates/0/content/parts")?.as_array()?;
            concat_text(parts.iter())
        }
    }
}
