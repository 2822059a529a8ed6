//! `convert`: directory-per-class trees and vote CSVs to JSONL manifests.

use std::collections::BTreeMap;
use std::path::{Component, Path, PathBuf};

use serde::Serialize;

use crate::datasets::{read_vote_csv, scan_class_tree};

use super::CliError;

#[derive(Debug, Serialize)]
struct LabelRow<'a> {
    id: &'a str,
    image: String,
    label: &'a str,
}

#[derive(Debug, Serialize)]
struct VoteRow<'a> {
    id: &'a str,
    image: String,
    votes: &'a BTreeMap<String, u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    split: Option<&'a str>,
}

/// Where a converted manifest lands and how many rows it has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvertOutcome {
    pub manifest: PathBuf,
    pub rows: usize,
}

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

/// `path` relative to `base` when `path` lies under it, else absolute.
fn relative_to(path: &Path, base: &Path) -> String {
    let path = absolute(path);
    let base = absolute(base);
    let shown = match path.strip_prefix(&base) {
        Ok(rel) if rel.components().all(|c| matches!(c, Component::Normal(_))) => rel.to_path_buf(),
        _ => path,
    };
    shown.to_string_lossy().replace('\\', "/")
}

fn default_output(input: &Path) -> PathBuf {
    if input.is_dir() {
        input.join("manifest.jsonl")
    } else {
        input.with_extension("jsonl")
    }
}

/// Converts `input` and writes the manifest to `output` (by default
/// `<root>/manifest.jsonl` for trees, `<csv stem>.jsonl` for vote tables).
pub fn cmd_convert(input: &Path, output: Option<&Path>) -> Result<ConvertOutcome, CliError> {
    let out = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_output(input));
    let out_dir = out.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut text = String::new();
    let rows;

    if input.is_dir() {
        let entries = scan_class_tree(input).map_err(|e| CliError::Usage(e.to_string()))?;
        for e in &entries {
            let row = LabelRow {
                id: &e.id,
                image: relative_to(&e.path, &out_dir),
                label: &e.label,
            };
            text.push_str(&serde_json::to_string(&row).expect("rows serialize"));
            text.push('\n');
        }
        rows = entries.len();
    } else if input.is_file() {
        let is_csv = input
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if !is_csv {
            return Err(CliError::Usage(format!(
                "{}: expected a directory-per-class tree or a vote CSV",
                input.display()
            )));
        }
        let table = read_vote_csv(input).map_err(|e| CliError::Usage(e.to_string()))?;
        if table.is_empty() {
            return Err(CliError::Usage(format!(
                "{}: no vote rows",
                input.display()
            )));
        }
        let csv_dir = input.parent().map(Path::to_path_buf).unwrap_or_default();
        for r in &table {
            let image_path = if Path::new(&r.image).is_absolute() {
                PathBuf::from(&r.image)
            } else {
                csv_dir.join(&r.image)
            };
            let row = VoteRow {
                id: &r.image,
                image: relative_to(&image_path, &out_dir),
                votes: &r.counts,
                split: r.split.as_deref().filter(|s| !s.is_empty()),
            };
            text.push_str(&serde_json::to_string(&row).expect("rows serialize"));
            text.push('\n');
        }
        rows = table.len();
    } else {
        return Err(CliError::Usage(format!(
            "{} does not exist",
            input.display()
        )));
    }

    std::fs::write(&out, text)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", out.display())))?;
    Ok(ConvertOutcome {
        manifest: out,
        rows,
    })
}
