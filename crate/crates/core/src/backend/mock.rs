use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use async_trait::async_trait;
use serde::Deserialize;
use thiserror::Error;

use super::{BackendConfig, QueryError, QueryRequest, VisionBackend};

#[derive(Debug, Error)]
pub enum MockScriptError {
    #[error("mock fixture {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("mock fixture {path}:{line}: {message}")]
    Line {
        path: String,
        line: usize,
        message: String,
    },
}

/// How a scripted error surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MockFailure {
    /// Retried like a dropped connection.
    #[default]
    Transport,
    /// Behaves like an HTTP 500.
    Protocol,
}

/// One fixture line. Either `answer_text` or `error` must be set.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptLine {
    sample_id: String,
    #[serde(default)]
    prompt_id: Option<String>,
    #[serde(default)]
    answer_text: Option<String>,
    #[serde(default)]
    error: Option<String>,
    #[serde(default)]
    error_kind: MockFailure,
    /// Fail this many calls with a transport error before answering.
    #[serde(default)]
    fail_times: usize,
}

#[derive(Debug, Clone)]
enum Scripted {
    Answer { text: String, fail_times: usize },
    Error { message: String, kind: MockFailure },
}

/// Scripted backend keyed by sample id (optionally per prompt).
///
/// Counts calls and tracks the peak number of concurrent calls so tests
/// can check the in-flight bound.
#[derive(Debug, Default)]
pub struct MockBackend {
    script: HashMap<(String, Option<String>), Scripted>,
    default_answer: Option<String>,
    delay: Option<Duration>,
    calls: AtomicUsize,
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
    attempts: Mutex<HashMap<String, usize>>,
}

impl MockBackend {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a JSONL fixture of
    /// `{"sample_id", "answer_text" | "error", ["prompt_id"], ["error_kind"], ["fail_times"]}`.
    pub fn from_jsonl(text: &str, origin: &str) -> Result<Self, MockScriptError> {
        let mut mock = MockBackend::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| MockScriptError::Line {
                path: origin.to_string(),
                line: idx + 1,
                message,
            };
            let row: ScriptLine = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
            let scripted = match (row.answer_text, row.error) {
                (Some(text), None) => Scripted::Answer {
                    text,
                    fail_times: row.fail_times,
                },
                (None, Some(message)) => Scripted::Error {
                    message,
                    kind: row.error_kind,
                },
                _ => {
                    return Err(err(
                        "exactly one of `answer_text` or `error` is required".into()
                    ))
                }
            };
            mock.script.insert((row.sample_id, row.prompt_id), scripted);
        }
        Ok(mock)
    }

    pub fn from_file(path: &Path) -> Result<Self, MockScriptError> {
        let text = std::fs::read_to_string(path).map_err(|source| MockScriptError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_jsonl(&text, &path.display().to_string())
    }

    pub fn answer(mut self, sample_id: &str, text: &str) -> Self {
        self.script.insert(
            (sample_id.to_string(), None),
            Scripted::Answer {
                text: text.to_string(),
                fail_times: 0,
            },
        );
        self
    }

    pub fn error(mut self, sample_id: &str, message: &str, kind: MockFailure) -> Self {
        self.script.insert(
            (sample_id.to_string(), None),
            Scripted::Error {
                message: message.to_string(),
                kind,
            },
        );
        self
    }

    /// Answer for samples with no script entry.
    pub fn with_default_answer(mut self, text: &str) -> Self {
        self.default_answer = Some(text.to_string());
        self
    }

    /// Holds every call open for `delay` before answering.
    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = Some(delay);
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn max_in_flight(&self) -> usize {
        self.max_in_flight.load(Ordering::SeqCst)
    }

    fn lookup(&self, sample_id: &str, prompt_id: &str) -> Option<&Scripted> {
        self.script
            .get(&(sample_id.to_string(), Some(prompt_id.to_string())))
            .or_else(|| self.script.get(&(sample_id.to_string(), None)))
    }

    fn respond(&self, req: QueryRequest<'_>) -> Result<String, QueryError> {
        let prompt_key = req.prompt.cache_key();
        match self.lookup(req.sample_id, &prompt_key) {
            Some(Scripted::Answer { text, fail_times }) => {
                if *fail_times > 0 {
                    let mut attempts = self.attempts.lock().unwrap_or_else(|p| p.into_inner());
                    let seen = attempts.entry(req.sample_id.to_string()).or_insert(0);
                    *seen += 1;
                    if *seen <= *fail_times {
                        return Err(QueryError::Transport(format!("scripted failure {seen}")));
                    }
                }
                Ok(text.clone())
            }
            Some(Scripted::Error { message, kind }) => Err(match kind {
                MockFailure::Transport => QueryError::Transport(message.clone()),
                MockFailure::Protocol => QueryError::Protocol {
                    status: Some(500),
                    message: message.clone(),
                    body: String::new(),
                },
            }),
            None => match &self.default_answer {
                Some(text) => Ok(text.clone()),
                None => Err(QueryError::Protocol {
                    status: None,
                    message: format!("no scripted answer for {}", req.sample_id),
                    body: String::new(),
                }),
            },
        }
    }
}

struct InFlight<'a>(&'a AtomicUsize);

impl Drop for InFlight<'_> {
    fn drop(&mut self) {
        self.0.fetch_sub(1, Ordering::SeqCst);
    }
}

#[async_trait]
impl VisionBackend for MockBackend {
    async fn generate(
        &self,
        _cfg: &BackendConfig,
        req: QueryRequest<'_>,
    ) -> Result<String, QueryError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        let _guard = InFlight(&self.in_flight);
        self.max_in_flight.fetch_max(now, Ordering::SeqCst);
        match self.delay {
            Some(d) => tokio::time::sleep(d).await,
            None => {
                // Give other in-flight calls a chance to overlap.
                for _ in 0..4 {
                    tokio::task::yield_now().await;
                }
            }
        }
        self.respond(req)
    }
}
