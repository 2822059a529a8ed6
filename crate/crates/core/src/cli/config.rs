//! Run configuration: one TOML document plus command-line overrides.
//!
//! ```toml
//! prompts = ["emoq0", "emoq1"]
//! cache_dir = "cache"
//! out_dir = "runs/llama"
//!
//! [backend]
//! kind = "ollama-style"
//! endpoint = "http://localhost:11434"
//! model = "llama3.2-vision:11b"
//!
//! [[datasets]]
//! name = "ferplus"
//! manifest = "data/ferplus_test.jsonl"
//! exclude = ["contempt"]
//! ```
//!
//! Relative paths are resolved against the directory holding the config
//! file (or the working directory for flags).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::backend::BackendConfig;
use crate::datasets::{preset_vocabulary, DatasetSpec, Layout};
use crate::lexicon::{LexiconSource, Precedence};
use crate::report::FailurePolicy;

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LexiconConfig {
    /// Lexicon file; the built-in table when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precedence: Option<Precedence>,
}

impl LexiconConfig {
    pub fn source(&self) -> LexiconSource {
        match &self.path {
            Some(p) => LexiconSource::File(p.clone()),
            None => LexiconSource::BuiltIn,
        }
    }

    pub fn precedence(&self) -> Precedence {
        self.precedence.clone().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    pub manifest: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Layout>,
    /// Defaults to the preset for `name`, else the seven basic expressions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<Vec<String>>,
    /// Labels whose samples are dropped (for example `contempt`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclude: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_root: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
}

impl DatasetConfig {
    /// Parses `NAME=PATH` (or a bare path, named after its file stem).
    pub fn from_flag(flag: &str) -> Result<Self, CliError> {
        let (name, path) = match flag.split_once('=') {
            Some((n, p)) if !n.trim().is_empty() => (n.trim().to_string(), PathBuf::from(p)),
            _ => {
                let path = PathBuf::from(flag);
                let name = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| {
                        CliError::Usage(format!("cannot derive a dataset name from {flag:?}"))
                    })?
                    .to_string();
                (name, path)
            }
        };
        Ok(DatasetConfig {
            name,
            manifest: path,
            layout: None,
            vocabulary: None,
            exclude: Vec::new(),
            tie_break: None,
            image_root: None,
            split: None,
        })
    }

    pub fn to_spec(&self) -> DatasetSpec {
        let layout = self.layout.unwrap_or_else(|| Layout::infer(&self.manifest));
        let mut spec = DatasetSpec::new(self.name.clone(), self.manifest.clone(), layout);
        if let Some(v) = &self.vocabulary {
            spec = spec.with_vocabulary(v.clone());
        } else if preset_vocabulary(&self.name).is_none() {
            log::debug!(
                "dataset {}: no preset, using the seven basic expressions",
                self.name
            );
        }
        for label in &self.exclude {
            spec = spec.excluding(label);
        }
        spec.tie_break = self.tie_break.clone();
        spec.image_root = self.image_root.clone();
        spec.split = self.split.clone();
        spec
    }
}

fn default_cache_dir() -> PathBuf {
    PathBuf::from("fer-cache")
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("fer-runs")
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `emoq0`..`emoq3`, prompt-file keys, or `custom:<text>`.
    #[serde(default)]
    pub prompts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_file: Option<PathBuf>,
    #[serde(default = "default_cache_dir")]
    pub cache_dir: PathBuf,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub failure_policy: FailurePolicy,
    /// Cells evaluated concurrently.
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Append published baseline rows to the Markdown report.
    #[serde(default)]
    pub with_baselines: bool,
    #[serde(default)]
    pub backend: BackendConfig,
    #[serde(default)]
    pub lexicon: LexiconConfig,
    #[serde(default)]
    pub datasets: Vec<DatasetConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prompts: Vec::new(),
            prompt_file: None,
            cache_dir: default_cache_dir(),
            out_dir: default_out_dir(),
            failure_policy: FailurePolicy::default(),
            jobs: default_jobs(),
            with_baselines: false,
            backend: BackendConfig::default(),
            lexicon: LexiconConfig::default(),
            datasets: Vec::new(),
        }
    }
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    /// Loads a config file, resolving relative paths against its directory.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("reading config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.resolve_paths(&base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        resolve(base, &mut self.cache_dir);
        resolve(base, &mut self.out_dir);
        if let Some(p) = &mut self.prompt_file {
            resolve(base, p);
        }
        if let Some(p) = &mut self.lexicon.path {
            resolve(base, p);
        }
        if let Some(p) = &mut self.backend.fixture {
            resolve(base, p);
        }
        for d in &mut self.datasets {
            resolve(base, &mut d.manifest);
            if let Some(r) = &mut d.image_root {
                resolve(base, r);
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.prompts.is_empty() {
            return Err(CliError::Usage(
                "no prompts configured (use --prompt or `prompts = [...]`)".into(),
            ));
        }
        if self.datasets.is_empty() {
            return Err(CliError::Usage(
                "no datasets configured (use --dataset or `[[datasets]]`)".into(),
            ));
        }
        if self.jobs < 1 {
            return Err(CliError::Usage("jobs must be >= 1".into()));
        }
        let mut names: Vec<&str> = self.datasets.iter().map(|d| d.name.as_str()).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::Usage(format!(
                "dataset {:?} is configured twice",
                w[0]
            )));
        }
        self.backend
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(p) = &self.lexicon.path {
            if !p.is_file() {
                return Err(CliError::Usage(format!(
                    "lexicon file {} not found",
                    p.display()
                )));
            }
        }
        for d in &self.datasets {
            if !d.manifest.exists() {
                return Err(CliError::Usage(format!(
                    "dataset {}: manifest {} not found",
                    d.name,
                    d.manifest.display()
                )));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs serialize")
    }
}
