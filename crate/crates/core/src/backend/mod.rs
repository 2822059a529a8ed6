//! Querying vision-language models: endpoint dialects, retry policy, the
//! content-addressed answer cache and the bounded-concurrency runner.

mod cache;
mod http;
mod mock;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use async_trait::async_trait;
use futures::{StreamExt, TryStreamExt};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::datasets::Dataset;
use crate::prompting::PromptSpec;

pub use cache::{CacheEntry, CacheError, CacheFileSummary, ResponseCache};
pub use http::{OllamaBackend, OpenAiBackend, API_KEY_ENV};
pub use mock::{MockBackend, MockFailure, MockScriptError};

/// Endpoint wire dialect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    /// `POST {endpoint}/chat/completions`
    OpenaiCompatible,
    /// `POST {endpoint}/api/generate`
    OllamaStyle,
    /// Scripted answers from a JSONL fixture.
    Mock,
}

impl std::str::FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "openai-compatible" | "openai" => Ok(BackendKind::OpenaiCompatible),
            "ollama-style" | "ollama" => Ok(BackendKind::OllamaStyle),
            "mock" => Ok(BackendKind::Mock),
            other => Err(format!(
                "unknown backend kind {other:?} (expected openai-compatible, ollama-style or mock)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_answer_tokens: u32,
    pub timeout_secs: f64,
    pub retries: u32,
    /// First backoff delay; doubles on every retry.
    pub backoff_ms: u64,
    pub parallelism: usize,
    /// Script for the mock backend.
    pub fixture: Option<PathBuf>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::OllamaStyle,
            endpoint: "http://localhost:11434".to_string(),
            model: String::new(),
            temperature: 0.0,
            max_answer_tokens: 32,
            timeout_secs: 120.0,
            retries: 2,
            backoff_ms: 500,
            parallelism: 4,
            fixture: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid backend config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Mock(#[from] MockScriptError),
    #[error("building HTTP client: {0}")]
    Client(String),
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.parallelism < 1 {
            return bad("parallelism must be >= 1");
        }
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return bad("timeout must be > 0");
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be >= 0");
        }
        if self.model.trim().is_empty() {
            return bad("model id is empty");
        }
        match self.kind {
            BackendKind::OpenaiCompatible | BackendKind::OllamaStyle
                if !(self.endpoint.starts_with("http://")
                    || self.endpoint.starts_with("https://")) =>
            {
                bad("endpoint must be an http(s) URL")
            }
            _ => Ok(()),
        }
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }

    fn backoff(&self, attempt: u32) -> Duration {
        Duration::from_millis(self.backoff_ms.saturating_mul(1u64 << attempt.min(16)))
    }
}

/// One question about one image.
#[derive(Debug, Clone, Copy)]
pub struct QueryRequest<'a> {
    pub sample_id: &'a str,
    pub image: &'a [u8],
    pub prompt: &'a PromptSpec,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QueryError {
    /// Timeouts and connection failures; retried.
    #[error("transport error: {0}")]
    Transport(String),
    /// Non-success status or malformed response; not retried.
    #[error("backend protocol error{}: {message}; body: {body}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Protocol {
        status: Option<u16>,
        message: String,
        body: String,
    },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

impl QueryError {
    pub fn is_retriable(&self) -> bool {
        matches!(self, QueryError::Transport(_))
    }
}

/// A model endpoint. Implementations send exactly one request per call.
#[async_trait]
pub trait VisionBackend: Send + Sync {
    async fn generate(
        &self,
        cfg: &BackendConfig,
        req: QueryRequest<'_>,
    ) -> Result<String, QueryError>;
}

/// Builds the backend selected by `cfg.kind`.
pub fn build_backend(cfg: &BackendConfig) -> Result<Arc<dyn VisionBackend>, ConfigError> {
    cfg.validate()?;
    Ok(match cfg.kind {
        BackendKind::OpenaiCompatible => Arc::new(OpenAiBackend::new(cfg)?),
        BackendKind::OllamaStyle => Arc::new(OllamaBackend::new(cfg)?),
        BackendKind::Mock => {
            let path = cfg
                .fixture
                .as_ref()
                .ok_or_else(|| ConfigError::Invalid("mock backend needs a fixture file".into()))?;
            Arc::new(MockBackend::from_file(path)?)
        }
    })
}

/// A verbatim model answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAnswer {
    pub sample_id: String,
    pub model: String,
    pub prompt_id: String,
    pub digest: String,
    /// Untrimmed response text.
    pub answer_text: String,
    /// Seconds spent on the successful request (from the cache entry on a hit).
    pub latency: f64,
    pub fetched_at: String,
    pub from_cache: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub sample_id: String,
    pub error: String,
}

/// Everything one (model, prompt, dataset) cell produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub backend: BackendConfig,
    pub prompt: PromptSpec,
    pub dataset: String,
    /// In dataset order.
    pub answers: Vec<RawAnswer>,
    /// In dataset order.
    pub failures: Vec<SampleFailure>,
}

impl RunRecord {
    pub fn cache_hits(&self) -> usize {
        self.answers.iter().filter(|a| a.from_cache).count()
    }
}

/// SHA-256 of the raw bytes, lowercase hex.
pub fn image_digest(image: &[u8]) -> String {
    hex_lower(&Sha256::digest(image))
}

fn hex_lower(bytes: &[u8]) -> String {
    use std::fmt::Write;
    bytes
        .iter()
        .fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Sends one query, retrying transport errors with exponential backoff.
pub async fn query_one(
    backend: &dyn VisionBackend,
    cfg: &BackendConfig,
    req: QueryRequest<'_>,
) -> Result<RawAnswer, QueryError> {
    if req.image.is_empty() {
        return Err(QueryError::InvalidRequest(format!(
            "image for {} is empty",
            req.sample_id
        )));
    }
    let mut attempt = 0;
    loop {
        let started = Instant::now();
        match backend.generate(cfg, req).await {
            Ok(text) => {
                return Ok(RawAnswer {
                    sample_id: req.sample_id.to_string(),
                    model: cfg.model.clone(),
                    prompt_id: req.prompt.cache_key(),
                    digest: image_digest(req.image),
                    answer_text: text,
                    latency: started.elapsed().as_secs_f64(),
                    fetched_at: chrono::Utc::now()
                        .to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
                    from_cache: false,
                });
            }
            Err(e) if e.is_retriable() && attempt < cfg.retries => {
                let delay = cfg.backoff(attempt);
                log::warn!(
                    "{}: {e}; retry {}/{} in {:?}",
                    req.sample_id,
                    attempt + 1,
                    cfg.retries,
                    delay
                );
                tokio::time::sleep(delay).await;
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

enum Outcome {
    Answer(RawAnswer),
    Failure(SampleFailure),
}

/// Queries every sample once, serving cache hits without touching the
/// backend. At most `cfg.parallelism` requests are in flight; results come
/// back in dataset order. Per-sample failures are recorded, cache I/O
/// failures abort the run.
pub async fn run_inference(
    backend: &dyn VisionBackend,
    cfg: &BackendConfig,
    dataset: &Dataset,
    prompt: &PromptSpec,
    cache: &ResponseCache,
) -> Result<RunRecord, RunError> {
    cfg.validate()?;
    let prompt_key = prompt.cache_key();

    let results: Vec<(usize, Outcome)> = futures::stream::iter(dataset.samples.iter().enumerate())
        .map(|(idx, sample)| {
            let prompt_key = prompt_key.as_str();
            async move {
                let fail = |error: String| {
                    Ok::<_, RunError>((
                        idx,
                        Outcome::Failure(SampleFailure {
                            sample_id: sample.id.clone(),
                            error,
                        }),
                    ))
                };
                let image = match sample.image.load().await {
                    Ok(bytes) => bytes,
                    Err(e) => return fail(format!("image unreadable: {e}")),
                };
                let digest = image_digest(&image);
                if let Some(hit) = cache.get(&cfg.model, prompt_key, &digest)? {
                    return Ok((
                        idx,
                        Outcome::Answer(RawAnswer {
                            sample_id: sample.id.clone(),
                            model: hit.model,
                            prompt_id: hit.prompt_id,
                            digest,
                            answer_text: hit.answer_text,
                            latency: hit.latency,
                            fetched_at: hit.fetched_at,
                            from_cache: true,
                        }),
                    ));
                }
                let req = QueryRequest {
                    sample_id: &sample.id,
                    image: &image,
                    prompt,
                };
                match query_one(backend, cfg, req).await {
                    Ok(answer) => {
                        cache.insert(CacheEntry::from(&answer))?;
                        Ok((idx, Outcome::Answer(answer)))
                    }
                    Err(e) => fail(e.to_string()),
                }
            }
        })
        .buffer_unordered(cfg.parallelism)
        .try_collect()
        .await?;

    let mut results = results;
    results.sort_by_key(|(idx, _)| *idx);
    let mut answers = Vec::new();
    let mut failures = Vec::new();
    for (_, outcome) in results {
        match outcome {
            Outcome::Answer(a) => answers.push(a),
            Outcome::Failure(f) => failures.push(f),
        }
    }
    if !failures.is_empty() {
        log::warn!(
            "{} / {} / {}: {} of {} samples failed",
            cfg.model,
            prompt.name,
            dataset.name(),
            failures.len(),
            dataset.len()
        );
    }
    Ok(RunRecord {
        run_id: uuid::Uuid::new_v4().to_string(),
        backend: cfg.clone(),
        prompt: prompt.clone(),
        dataset: dataset.name().to_string(),
        answers,
        failures,
    })
}
