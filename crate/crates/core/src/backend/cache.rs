use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::RawAnswer;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cache {path}:{line}: corrupt entry: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// One cached answer, keyed by (model, prompt_id, digest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub digest: String,
    pub sample_id: String,
    pub model: String,
    pub prompt_id: String,
    pub answer_text: String,
    pub latency: f64,
    pub fetched_at: String,
}

impl From<&RawAnswer> for CacheEntry {
    fn from(a: &RawAnswer) -> Self {
        CacheEntry {
            digest: a.digest.clone(),
            sample_id: a.sample_id.clone(),
            model: a.model.clone(),
            prompt_id: a.prompt_id.clone(),
            answer_text: a.answer_text.clone(),
            latency: a.latency,
            fetched_at: a.fetched_at.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheFileSummary {
    pub path: PathBuf,
    pub model: String,
    pub prompt_id: String,
    pub entries: usize,
}

type CellKey = (String, String);

/// Append-only JSONL answer cache, one file per (model, prompt) pair.
///
/// Files are loaded lazily on first lookup. The first entry for a digest
/// wins; later inserts for the same key are ignored, so existing lines are
/// never rewritten.
#[derive(Debug)]
pub struct ResponseCache {
    dir: PathBuf,
    cells: Mutex<HashMap<CellKey, HashMap<String, CacheEntry>>>,
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

impl ResponseCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CacheError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| CacheError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(ResponseCache {
            dir,
            cells: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn file_for(&self, model: &str, prompt_id: &str) -> PathBuf {
        self.dir.join(format!(
            "{}__{}.jsonl",
            sanitize(model),
            sanitize(prompt_id)
        ))
    }

    fn load_cell(
        &self,
        model: &str,
        prompt_id: &str,
    ) -> Result<HashMap<String, CacheEntry>, CacheError> {
        let path = self.file_for(model, prompt_id);
        let mut map = HashMap::new();
        if !path.exists() {
            return Ok(map);
        }
        for entry in read_entries(&path)? {
            // Sanitized names can collide; keep only this cell's entries.
            if entry.model == model && entry.prompt_id == prompt_id {
                map.entry(entry.digest.clone()).or_insert(entry);
            }
        }
        Ok(map)
    }

    fn with_cell<T>(
        &self,
        model: &str,
        prompt_id: &str,
        f: impl FnOnce(&mut HashMap<String, CacheEntry>) -> Result<T, CacheError>,
    ) -> Result<T, CacheError> {
        let mut cells = self.cells.lock().unwrap_or_else(|p| p.into_inner());
        let key = (model.to_string(), prompt_id.to_string());
        if !cells.contains_key(&key) {
            let loaded = self.load_cell(model, prompt_id)?;
            cells.insert(key.clone(), loaded);
        }
        f(cells.get_mut(&key).expect("inserted above"))
    }

    pub fn get(
        &self,
        model: &str,
        prompt_id: &str,
        digest: &str,
    ) -> Result<Option<CacheEntry>, CacheError> {
        self.with_cell(model, prompt_id, |cell| Ok(cell.get(digest).cloned()))
    }

    /// Appends `entry` unless its key is already cached. Returns whether a
    /// line was written.
    pub fn insert(&self, entry: CacheEntry) -> Result<bool, CacheError> {
        let path = self.file_for(&entry.model, &entry.prompt_id);
        let (model, prompt_id) = (entry.model.clone(), entry.prompt_id.clone());
        self.with_cell(&model, &prompt_id, |cell| {
            if cell.contains_key(&entry.digest) {
                return Ok(false);
            }
            let io = |source| CacheError::Io {
                path: path.clone(),
                source,
            };
            let mut line = serde_json::to_string(&entry).expect("cache entries serialize");
            line.push('\n');
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .map_err(io)?;
            file.write_all(line.as_bytes()).map_err(io)?;
            file.flush().map_err(io)?;
            cell.insert(entry.digest.clone(), entry);
            Ok(true)
        })
    }

    /// Summaries of every cache file, sorted by path.
    pub fn list(&self) -> Result<Vec<CacheFileSummary>, CacheError> {
        let mut out = Vec::new();
        for path in self.files()? {
            let entries = read_entries(&path)?;
            let (model, prompt_id) = entries
                .first()
                .map(|e| (e.model.clone(), e.prompt_id.clone()))
                .unwrap_or_default();
            out.push(CacheFileSummary {
                path,
                model,
                prompt_id,
                entries: entries.len(),
            });
        }
        Ok(out)
    }

    /// Deletes cache files, optionally only those for one model and/or
    /// prompt. Returns the removed paths.
    pub fn purge(
        &self,
        model: Option<&str>,
        prompt_id: Option<&str>,
    ) -> Result<Vec<PathBuf>, CacheError> {
        let mut removed = Vec::new();
        for summary in self.list()? {
            if model.is_some_and(|m| m != summary.model)
                || prompt_id.is_some_and(|p| p != summary.prompt_id)
            {
                continue;
            }
            fs::remove_file(&summary.path).map_err(|source| CacheError::Io {
                path: summary.path.clone(),
                source,
            })?;
            removed.push(summary.path);
        }
        self.cells.lock().unwrap_or_else(|p| p.into_inner()).clear();
        Ok(removed)
    }

    fn files(&self) -> Result<Vec<PathBuf>, CacheError> {
        let io = |source| CacheError::Io {
            path: self.dir.clone(),
            source,
        };
        let mut files = Vec::new();
        for entry in fs::read_dir(&self.dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().is_some_and(|e| e == "jsonl") {
                files.push(path);
            }
        }
        files.sort();
        Ok(files)
    }
}

/// Reads every entry of one cache file, reporting the first bad line.
pub fn read_entries(path: &Path) -> Result<Vec<CacheEntry>, CacheError> {
    let file = fs::File::open(path).map_err(|source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| CacheError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = serde_json::from_str(&line).map_err(|e| CacheError::Corrupt {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(entry);
    }
    Ok(out)
}
