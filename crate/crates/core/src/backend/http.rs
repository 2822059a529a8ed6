//! The two HTTP+JSON dialects.

use async_trait::async_trait;
use base64::Engine;
use serde_json::{json, Value};

use super::{BackendConfig, ConfigError, QueryError, QueryRequest, VisionBackend};

/// Environment variable holding an optional bearer token for the endpoint.
pub const API_KEY_ENV: &str = "FER_PROBE_API_KEY";

fn client(cfg: &BackendConfig) -> Result<reqwest::Client, ConfigError> {
    reqwest::Client::builder()
        .timeout(cfg.timeout())
        .build()
        .map_err(|e| ConfigError::Client(e.to_string()))
}

fn api_key() -> Option<String> {
    std::env::var(API_KEY_ENV)
        .ok()
        .filter(|k| !k.trim().is_empty())
}

fn join_url(endpoint: &str, path: &str) -> String {
    let base = endpoint.trim_end_matches('/');
    if base.ends_with(path) {
        base.to_string()
    } else {
        format!("{base}{path}")
    }
}

/// Best-effort MIME type from magic bytes, for data URLs.
fn sniff_mime(image: &[u8]) -> &'static str {
    match image {
        [0x89, b'P', b'N', b'G', ..] => "image/png",
        [0xFF, 0xD8, 0xFF, ..] => "image/jpeg",
        [b'G', b'I', b'F', b'8', ..] => "image/gif",
        [b'R', b'I', b'F', b'F', _, _, _, _, b'W', b'E', b'B', b'P', ..] => "image/webp",
        [b'B', b'M', ..] => "image/bmp",
        _ => "image/jpeg",
    }
}

fn transport_or_protocol(e: reqwest::Error) -> QueryError {
    if e.is_timeout() || e.is_connect() || e.is_request() {
        QueryError::Transport(e.to_string())
    } else {
        QueryError::Protocol {
            status: e.status().map(|s| s.as_u16()),
            message: e.to_string(),
            body: String::new(),
        }
    }
}

async fn post_json(client: &reqwest::Client, url: &str, body: &Value) -> Result<Value, QueryError> {
    let mut request = client.post(url).json(body);
    if let Some(key) = api_key() {
        request = request.bearer_auth(key);
    }
    let response = request.send().await.map_err(transport_or_protocol)?;
    let status = response.status();
    let text = response.text().await.map_err(transport_or_protocol)?;
    if !status.is_success() {
        return Err(QueryError::Protocol {
            status: Some(status.as_u16()),
            message: "non-success status".into(),
            body: text,
        });
    }
    serde_json::from_str(&text).map_err(|e| QueryError::Protocol {
        status: Some(status.as_u16()),
        message: format!("response is not JSON: {e}"),
        body: text,
    })
}

fn missing_field(field: &str, body: &Value) -> QueryError {
    QueryError::Protocol {
        status: None,
        message: format!("response has no {field}"),
        body: body.to_string(),
    }
}

/// OpenAI-compatible chat completions (vLLM, llama.cpp server, LM Studio…).
#[derive(Debug, Clone)]
pub struct OpenAiBackend {
    client: reqwest::Client,
    url: String,
}

impl OpenAiBackend {
    pub fn new(cfg: &BackendConfig) -> Result<Self, ConfigError> {
        Ok(OpenAiBackend {
            client: client(cfg)?,
            url: join_url(&cfg.endpoint, "/chat/completions"),
        })
    }

    pub fn request_body(cfg: &BackendConfig, req: QueryRequest<'_>) -> Value {
        let b64 = base64::engine::general_purpose::STANDARD.encode(req.image);
        json!({
            "model": cfg.model,
            "messages": [{
                "role": "user",
                "content": [
                    {"type": "text", "text": req.prompt.text},
                    {"type": "image_url", "image_url": {"url": format!("data:{};base64,{b64}", sniff_mime(req.image))}},
                ],
            }],
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_answer_tokens,
            "stream": false,
        })
    }

    pub fn extract_text(body: &Value) -> Result<String, QueryError> {
        let content = body
            .pointer("/choices/0/message/content")
            .ok_or_else(|| missing_field("choices[0].message.content", body))?;
        match content {
            Value::String(s) => Ok(s.clone()),
            // Some servers return content parts.
            Value::Array(parts) => {
                let text: Vec<&str> = parts
                    .iter()
                    .filter_map(|p| p.get("text").and_then(Value::as_str))
                    .collect();
                if text.is_empty() {
                    Err(missing_field("text content part", body))
                } else {
                    Ok(text.concat())
                }
            }
            _ => Err(missing_field("string content", body)),
        }
    }
}

#[async_trait]
impl VisionBackend for OpenAiBackend {
    async fn generate(
        &self,
        cfg: &BackendConfig,
        req: QueryRequest<'_>,
    ) -> Result<String, QueryError> {
        let body = post_json(&self.client, &self.url, &Self::request_body(cfg, req)).await?;
        Self::extract_text(&body)
    }
}

/// Ollama-style `/api/generate`.
#[derive(Debug, Clone)]
pub struct OllamaBackend {
    client: reqwest::Client,
    url: String,
}

impl OllamaBackend {
    pub fn new(cfg: &BackendConfig) -> Result<Self, ConfigError> {
        Ok(OllamaBackend {
            client: client(cfg)?,
            url: join_url(&cfg.endpoint, "/api/generate"),
        })
    }

    pub fn request_body(cfg: &BackendConfig, req: QueryRequest<'_>) -> Value {
        json!({
            "model": cfg.model,
            "prompt": req.prompt.text,
            "images": [base64::engine::general_purpose::STANDARD.encode(req.image)],
            "stream": false,
            "options": {
                "temperature": cfg.temperature,
                "num_predict": cfg.max_answer_tokens,
            },
        })
    }

    pub fn extract_text(body: &Value) -> Result<String, QueryError> {
        body.get("response")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| missing_field("response", body))
    }
}

#[async_trait]
impl VisionBackend for OllamaBackend {
    async fn generate(
        &self,
        cfg: &BackendConfig,
        req: QueryRequest<'_>,
    ) -> Result<String, QueryError> {
        let body = post_json(&self.client, &self.url, &Self::request_body(cfg, req)).await?;
        Self::extract_text(&body)
    }
}
