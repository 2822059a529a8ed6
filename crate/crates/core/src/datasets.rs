//! Benchmark ingestion: JSONL manifests, directory-per-class trees and
//! multi-annotator vote tables.
//!
//! A JSONL manifest has one object per line, either
//! `{"id": .., "image": .., "label": ..}` or
//! `{"id": .., "image": .., "votes": {"happiness": 7, "neutral": 3}}`,
//! with an optional `"split"` field. Relative image paths resolve against
//! the manifest's directory unless an image root is given.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab::{normalize_label_token, BasicExpression, GroundTruthLabel, ImageRef, Sample};

/// Vote winners that mark an annotation artifact rather than an expression.
pub const DROP_LABELS: [&str; 2] = ["unknown", "not-a-face"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{row}: {message}")]
    Row {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("dataset spec {name:?}: {message}")]
    Spec { name: String, message: String },
    #[error("vote record {0:?} has no positive counts")]
    EmptyVotes(String),
    #[error("{0}")]
    Layout(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    #[serde(alias = "jsonl")]
    JsonlManifest,
    DirectoryPerClass,
    VoteCsv,
}

impl Layout {
    /// Guesses the layout from a path: directories are per-class trees,
    /// `.csv` files are vote tables, everything else is JSONL.
    pub fn infer(path: &Path) -> Layout {
        if path.is_dir() {
            Layout::DirectoryPerClass
        } else if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        {
            Layout::VoteCsv
        } else {
            Layout::JsonlManifest
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalPolicy {
    Include,
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub vocabulary: Vec<String>,
    pub manifest: PathBuf,
    pub layout: Layout,
    pub eval_policy: BTreeMap<String, EvalPolicy>,
    /// Vote tie-break order; defaults to the vocabulary order.
    pub tie_break: Option<Vec<String>>,
    /// Base directory for relative image paths.
    pub image_root: Option<PathBuf>,
    /// Keep only rows whose split/usage column equals this value.
    pub split: Option<String>,
}

fn basic_vocabulary() -> Vec<String> {
    BasicExpression::ALL
        .iter()
        .map(|e| e.name().to_string())
        .collect()
}

/// Known benchmark vocabularies, looked up by name (case and punctuation
/// insensitive): `affectnet7`, `ferplus`, `rafdb`.
pub fn preset_vocabulary(name: &str) -> Option<Vec<String>> {
    let key: String = name
        .chars()
        .filter(|c| c.is_alphanumeric())
        .collect::<String>()
        .to_lowercase();
    match key.as_str() {
        "affectnet7" | "affectnet" | "rafdb" | "raf" => Some(basic_vocabulary()),
        "ferplus" | "fer" => {
            let mut v = basic_vocabulary();
            v.push("contempt".to_string());
            v.sort();
            Some(v)
        }
        _ => None,
    }
}

impl DatasetSpec {
    /// Builds a spec with every label included; the vocabulary comes from a
    /// preset when `name` is known, else the seven basic expressions.
    pub fn new(name: impl Into<String>, manifest: impl Into<PathBuf>, layout: Layout) -> Self {
        let name = name.into();
        let vocabulary = preset_vocabulary(&name).unwrap_or_else(basic_vocabulary);
        let eval_policy = vocabulary
            .iter()
            .map(|v| (v.clone(), EvalPolicy::Include))
            .collect();
        DatasetSpec {
            name,
            vocabulary,
            manifest: manifest.into(),
            layout,
            eval_policy,
            tie_break: None,
            image_root: None,
            split: None,
        }
    }

    pub fn with_vocabulary(mut self, vocabulary: Vec<String>) -> Self {
        self.vocabulary = vocabulary
            .iter()
            .map(|v| normalize_label_token(v))
            .collect();
        self.eval_policy = self
            .vocabulary
            .iter()
            .map(|v| (v.clone(), EvalPolicy::Include))
            .collect();
        self
    }

    pub fn excluding(mut self, label: &str) -> Self {
        self.eval_policy
            .insert(normalize_label_token(label), EvalPolicy::Exclude);
        self
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let err = |message: String| DatasetError::Spec {
            name: self.name.clone(),
            message,
        };
        if self.vocabulary.is_empty() {
            return Err(err("vocabulary is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &self.vocabulary {
            if !seen.insert(v.as_str()) {
                return Err(err(format!("duplicate vocabulary token {v:?}")));
            }
        }
        for v in &self.vocabulary {
            if !self.eval_policy.contains_key(v) {
                return Err(err(format!("eval policy does not cover {v:?}")));
            }
        }
        for k in self.eval_policy.keys() {
            if !seen.contains(k.as_str()) {
                return Err(err(format!(
                    "eval policy names {k:?}, which is not in the vocabulary"
                )));
            }
        }
        Ok(())
    }

    fn is_included(&self, label: &str) -> bool {
        self.eval_policy.get(label) != Some(&EvalPolicy::Exclude)
    }

    /// Vocabulary tokens left after applying the eval policy.
    pub fn scored_classes(&self) -> Vec<GroundTruthLabel> {
        self.vocabulary
            .iter()
            .filter(|v| self.is_included(v))
            .map(|v| GroundTruthLabel::new(v))
            .collect()
    }

    pub fn excluded_classes(&self) -> Vec<GroundTruthLabel> {
        self.vocabulary
            .iter()
            .filter(|v| !self.is_included(v))
            .map(|v| GroundTruthLabel::new(v))
            .collect()
    }

    fn default_tie_break(&self) -> Vec<String> {
        let mut order = self.vocabulary.clone();
        order.extend(DROP_LABELS.iter().map(|s| s.to_string()));
        order
    }

    fn image_base(&self) -> PathBuf {
        if let Some(root) = &self.image_root {
            return root.clone();
        }
        match self.layout {
            Layout::DirectoryPerClass => self.manifest.clone(),
            _ => self
                .manifest
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_default(),
        }
    }
}

/// An ordered, immutable list of samples.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub spec: DatasetSpec,
    pub samples: Vec<Sample>,
    /// Samples dropped at ingestion (excluded labels, artifact vote winners).
    pub dropped: usize,
}

impl Dataset {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Builds a dataset from in-memory samples. Labels are validated against
    /// the spec vocabulary and excluded labels are dropped.
    pub fn from_samples(spec: DatasetSpec, samples: Vec<Sample>) -> Result<Self, DatasetError> {
        spec.validate()?;
        let mut kept = Vec::with_capacity(samples.len());
        let mut dropped = 0;
        for s in samples {
            if !spec.vocabulary.iter().any(|v| v == s.gt.as_str()) {
                return Err(DatasetError::Spec {
                    name: spec.name.clone(),
                    message: format!(
                        "sample {:?} has label {:?} outside the vocabulary",
                        s.id,
                        s.gt.as_str()
                    ),
                });
            }
            if spec.is_included(s.gt.as_str()) {
                kept.push(s);
            } else {
                dropped += 1;
            }
        }
        finish(spec, kept, dropped)
    }
}

fn finish(
    spec: DatasetSpec,
    mut samples: Vec<Sample>,
    dropped: usize,
) -> Result<Dataset, DatasetError> {
    samples.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = samples.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(DatasetError::Spec {
            name: spec.name.clone(),
            message: format!("duplicate sample id {:?}", w[0].id),
        });
    }
    log::info!(
        "dataset {}: {} samples loaded, {} dropped",
        spec.name,
        samples.len(),
        dropped
    );
    Ok(Dataset {
        spec,
        samples,
        dropped,
    })
}

/// Per-annotator vote counts for one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRecord {
    pub sample_id: String,
    pub counts: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MajorityOutcome {
    Label(GroundTruthLabel),
    /// The winner was an artifact label such as `unknown` or `not-a-face`.
    Dropped(String),
}

/// Argmax over vote counts; ties go to the label earliest in `tie_break`,
/// then alphabetically among labels not listed.
pub fn majority_label(
    votes: &VoteRecord,
    tie_break: &[String],
) -> Result<MajorityOutcome, DatasetError> {
    let rank = |label: &str| {
        tie_break
            .iter()
            .position(|t| t == label)
            .unwrap_or(tie_break.len())
    };
    let winner = votes
        .counts
        .iter()
        .filter(|(_, c)| **c > 0)
        .max_by(|(la, ca), (lb, cb)| {
            ca.cmp(cb)
                .then_with(|| rank(lb).cmp(&rank(la)))
                .then_with(|| lb.cmp(la))
        })
        .map(|(l, _)| l.as_str())
        .ok_or_else(|| DatasetError::EmptyVotes(votes.sample_id.clone()))?;
    if DROP_LABELS.contains(&winner) {
        Ok(MajorityOutcome::Dropped(winner.to_string()))
    } else {
        Ok(MajorityOutcome::Label(GroundTruthLabel::new(winner)))
    }
}

/// Number of samples per GT label.
pub fn class_counts(dataset: &Dataset) -> BTreeMap<GroundTruthLabel, usize> {
    let mut out = BTreeMap::new();
    for s in &dataset.samples {
        *out.entry(s.gt.clone()).or_insert(0) += 1;
    }
    out
}

pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset, DatasetError> {
    spec.validate()?;
    match spec.layout {
        Layout::JsonlManifest => load_jsonl(spec),
        Layout::DirectoryPerClass => load_directory(spec),
        Layout::VoteCsv => load_vote_csv(spec),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestRow {
    id: String,
    image: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    votes: Option<BTreeMap<String, u32>>,
    #[serde(default)]
    split: Option<String>,
}

/// Shared ingestion state: resolves labels, applies policy, collects samples.
struct Ingest<'a> {
    spec: &'a DatasetSpec,
    base: PathBuf,
    tie_break: Vec<String>,
    samples: Vec<Sample>,
    dropped: usize,
}

impl<'a> Ingest<'a> {
    fn new(spec: &'a DatasetSpec) -> Self {
        let tie_break = spec
            .tie_break
            .as_ref()
            .map(|t| t.iter().map(|x| normalize_label_token(x)).collect())
            .unwrap_or_else(|| spec.default_tie_break());
        Ingest {
            spec,
            base: spec.image_base(),
            tie_break,
            samples: Vec::new(),
            dropped: 0,
        }
    }

    fn in_vocab(&self, label: &str) -> bool {
        self.spec.vocabulary.iter().any(|v| v == label)
    }

    fn image(&self, image: &str) -> ImageRef {
        let p = Path::new(image);
        if p.is_absolute() {
            ImageRef::Path(p.to_path_buf())
        } else {
            ImageRef::Path(self.base.join(p))
        }
    }

    /// Returns an error message for the row, if any.
    fn push_label(&mut self, id: String, image: ImageRef, label: &str) -> Result<(), String> {
        let label = normalize_label_token(label);
        if !self.in_vocab(&label) {
            return Err(format!(
                "label {label:?} is not in the {} vocabulary [{}]",
                self.spec.name,
                self.spec.vocabulary.join(", ")
            ));
        }
        if !self.spec.is_included(&label) {
            self.dropped += 1;
            return Ok(());
        }
        self.samples.push(Sample {
            id,
            image,
            gt: GroundTruthLabel::new(&label),
        });
        Ok(())
    }

    fn push_votes(
        &mut self,
        id: String,
        image: &str,
        counts: BTreeMap<String, u32>,
    ) -> Result<(), String> {
        let counts: BTreeMap<String, u32> = counts
            .into_iter()
            .map(|(k, v)| (canonical_vote_key(&k), v))
            .collect();
        for k in counts.keys() {
            if !self.in_vocab(k) && !DROP_LABELS.contains(&k.as_str()) {
                return Err(format!(
                    "vote label {k:?} is not in the {} vocabulary",
                    self.spec.name
                ));
            }
        }
        let record = VoteRecord {
            sample_id: id.clone(),
            counts,
        };
        match majority_label(&record, &self.tie_break).map_err(|e| e.to_string())? {
            MajorityOutcome::Label(label) => {
                let image = self.image(image);
                self.push_label(id, image, label.as_str())
            }
            MajorityOutcome::Dropped(_) => {
                self.dropped += 1;
                Ok(())
            }
        }
    }

    fn split_matches(&self, split: Option<&str>) -> bool {
        match (&self.spec.split, split) {
            (None, _) => true,
            (Some(want), Some(have)) => want.eq_ignore_ascii_case(have.trim()),
            (Some(_), None) => false,
        }
    }

    fn finish(self) -> Result<Dataset, DatasetError> {
        finish(self.spec.clone(), self.samples, self.dropped)
    }
}

fn canonical_vote_key(key: &str) -> String {
    let k = normalize_label_token(key);
    match k.as_str() {
        "nf" | "not a face" | "notaface" => "not-a-face".to_string(),
        _ => k,
    }
}

fn load_jsonl(spec: &DatasetSpec) -> Result<Dataset, DatasetError> {
    let path = &spec.manifest;
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut ingest = Ingest::new(spec);
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let row_no = idx + 1;
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let row_err = |message: String| DatasetError::Row {
            path: path.clone(),
            row: row_no,
            message,
        };
        let row: ManifestRow = serde_json::from_str(&line).map_err(|e| row_err(e.to_string()))?;
        if !ingest.split_matches(row.split.as_deref()) {
            continue;
        }
        let result = match (row.label, row.votes) {
            (Some(label), None) => {
                let image = ingest.image(&row.image);
                ingest.push_label(row.id, image, &label)
            }
            (None, Some(votes)) => ingest.push_votes(row.id, &row.image, votes),
            (Some(_), Some(_)) => Err("row has both `label` and `votes`".to_string()),
            (None, None) => Err("row has neither `label` nor `votes`".to_string()),
        };
        result.map_err(row_err)?;
    }
    ingest.finish()
}

const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg", "bmp", "gif", "webp", "tif", "tiff"];

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

fn is_hidden(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with('.'))
}

/// One labelled image found in a directory-per-class tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEntry {
    /// Path relative to the tree root, `/`-separated.
    pub id: String,
    pub label: String,
    pub path: PathBuf,
}

/// Walks `root/<label>/<image>`; anything else at either level is a layout
/// error. Entries come back sorted by id.
pub fn scan_class_tree(root: &Path) -> Result<Vec<TreeEntry>, DatasetError> {
    let mut entries = Vec::new();
    let mut class_dirs = 0;
    for dir in read_dir_sorted(root)? {
        if is_hidden(&dir) {
            continue;
        }
        if !dir.is_dir() {
            if is_image(&dir) {
                return Err(DatasetError::Layout(format!(
                    "{}: image file at the tree root; expected <root>/<label>/<image>",
                    dir.display()
                )));
            }
            continue;
        }
        class_dirs += 1;
        let label = dir
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .to_string();
        for file in read_dir_sorted(&dir)? {
            if is_hidden(&file) {
                continue;
            }
            if file.is_dir() {
                return Err(DatasetError::Layout(format!(
                    "{}: nested directory inside class folder {label:?}",
                    file.display()
                )));
            }
            if !is_image(&file) {
                continue;
            }
            let name = file
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default();
            entries.push(TreeEntry {
                id: format!("{label}/{name}"),
                label: label.clone(),
                path: file,
            });
        }
    }
    if class_dirs == 0 || entries.is_empty() {
        return Err(DatasetError::Layout(format!(
            "{}: no <label>/<image> entries found",
            root.display()
        )));
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(entries)
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<PathBuf>, DatasetError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        out.push(entry.map_err(io_err(dir))?.path());
    }
    out.sort();
    Ok(out)
}

fn load_directory(spec: &DatasetSpec) -> Result<Dataset, DatasetError> {
    let mut ingest = Ingest::new(spec);
    for entry in scan_class_tree(&spec.manifest)? {
        ingest
            .push_label(entry.id, ImageRef::Path(entry.path.clone()), &entry.label)
            .map_err(|message| DatasetError::Row {
                path: entry.path.clone(),
                row: 0,
                message,
            })?;
    }
    ingest.finish()
}

/// One row of a vote table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteRow {
    pub row: usize,
    pub image: String,
    pub split: Option<String>,
    pub counts: BTreeMap<String, u32>,
}

const IMAGE_COLUMNS: &[&str] = &[
    "image name",
    "image",
    "image_name",
    "file",
    "filename",
    "id",
];
const SPLIT_COLUMNS: &[&str] = &["usage", "split"];

/// Reads a vote table (header row with an image column, an optional
/// usage/split column, and one integer column per label). Rows with an
/// empty image name are skipped.
pub fn read_vote_csv(path: &Path) -> Result<Vec<VoteRow>, DatasetError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let row_err = |row: usize, message: String| DatasetError::Row {
        path: path.to_path_buf(),
        row,
        message,
    };
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| row_err(1, e.to_string()))?
        .iter()
        .map(normalize_label_token)
        .collect();
    let image_col = headers
        .iter()
        .position(|h| IMAGE_COLUMNS.contains(&h.as_str()))
        .ok_or_else(|| {
            row_err(
                1,
                "no image column (expected one of: image name, image, file, id)".into(),
            )
        })?;
    let split_col = headers
        .iter()
        .position(|h| SPLIT_COLUMNS.contains(&h.as_str()));
    let label_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != image_col && Some(*i) != split_col)
        .map(|(i, h)| (i, canonical_vote_key(h)))
        .collect();

    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row_no = idx + 2;
        let record = record.map_err(|e| row_err(row_no, e.to_string()))?;
        let image = record.get(image_col).unwrap_or("").to_string();
        if image.is_empty() {
            continue;
        }
        let mut counts = BTreeMap::new();
        for (i, label) in &label_cols {
            let raw = record.get(*i).unwrap_or("");
            let n: u32 = raw.parse().map_err(|_| {
                row_err(
                    row_no,
                    format!("vote count {raw:?} for {label:?} is not a non-negative integer"),
                )
            })?;
            counts.insert(label.clone(), n);
        }
        rows.push(VoteRow {
            row: row_no,
            image,
            split: split_col.and_then(|c| record.get(c)).map(str::to_string),
            counts,
        });
    }
    Ok(rows)
}

fn load_vote_csv(spec: &DatasetSpec) -> Result<Dataset, DatasetError> {
    let mut ingest = Ingest::new(spec);
    for row in read_vote_csv(&spec.manifest)? {
        if !ingest.split_matches(row.split.as_deref()) {
            continue;
        }
        ingest
            .push_votes(row.image.clone(), &row.image, row.counts)
            .map_err(|message| DatasetError::Row {
                path: spec.manifest.clone(),
                row: row.row,
                message,
            })?;
    }
    ingest.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn votes(pairs: &[(&str, u32)]) -> VoteRecord {
        VoteRecord {
            sample_id: "s".into(),
            counts: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn alphabetical() -> Vec<String> {
        let mut v = preset_vocabulary("ferplus").unwrap();
        v.extend(DROP_LABELS.iter().map(|s| s.to_string()));
        v.sort();
        v
    }

    #[test]
    fn majority_examples() {
        let tb = alphabetical();
        assert_eq!(
            majority_label(&votes(&[("happiness", 10), ("anger", 0), ("fear", 0)]), &tb).unwrap(),
            MajorityOutcome::Label(GroundTruthLabel::new("happiness"))
        );
        assert_eq!(
            majority_label(&votes(&[("anger", 5), ("sadness", 5)]), &tb).unwrap(),
            MajorityOutcome::Label(GroundTruthLabel::new("anger"))
        );
        assert_eq!(
            majority_label(&votes(&[("unknown", 6), ("fear", 4)]), &tb).unwrap(),
            MajorityOutcome::Dropped("unknown".into())
        );
        assert!(majority_label(&votes(&[]), &tb).is_err());
        assert!(majority_label(&votes(&[("fear", 0)]), &tb).is_err());
    }

    #[test]
    fn tie_break_order_is_respected() {
        let tb = vec!["sadness".to_string(), "anger".to_string()];
        assert_eq!(
            majority_label(&votes(&[("anger", 5), ("sadness", 5)]), &tb).unwrap(),
            MajorityOutcome::Label(GroundTruthLabel::new("sadness"))
        );
        // Unlisted labels lose ties to listed ones, then go alphabetically.
        assert_eq!(
            majority_label(&votes(&[("fear", 3), ("disgust", 3), ("anger", 3)]), &tb).unwrap(),
            MajorityOutcome::Label(GroundTruthLabel::new("anger"))
        );
        assert_eq!(
            majority_label(&votes(&[("fear", 3), ("disgust", 3)]), &tb).unwrap(),
            MajorityOutcome::Label(GroundTruthLabel::new("disgust"))
        );
    }

    #[test]
    fn presets() {
        assert_eq!(preset_vocabulary("AffectNet7").unwrap().len(), 7);
        assert_eq!(preset_vocabulary("RAF-DB").unwrap().len(), 7);
        let fer = preset_vocabulary("FERPlus").unwrap();
        assert_eq!(fer.len(), 8);
        assert!(fer.contains(&"contempt".to_string()));
        assert!(preset_vocabulary("ckplus").is_none());
    }

    #[test]
    fn spec_validation() {
        let spec = DatasetSpec::new("x", "m.jsonl", Layout::JsonlManifest).with_vocabulary(vec![]);
        assert!(spec.validate().is_err());
        let spec = DatasetSpec::new("x", "m.jsonl", Layout::JsonlManifest)
            .with_vocabulary(vec!["a".into(), "a".into()]);
        assert!(spec.validate().is_err());
        let spec =
            DatasetSpec::new("ferplus", "m.jsonl", Layout::JsonlManifest).excluding("contempt");
        spec.validate().unwrap();
        assert_eq!(spec.scored_classes().len(), 7);
        assert_eq!(
            spec.excluded_classes(),
            vec![GroundTruthLabel::new("contempt")]
        );
        let spec =
            DatasetSpec::new("affectnet7", "m.jsonl", Layout::JsonlManifest).excluding("contempt");
        assert!(spec.validate().is_err());
    }

    #[test]
    fn layout_inference() {
        assert_eq!(Layout::infer(Path::new("votes.CSV")), Layout::VoteCsv);
        assert_eq!(Layout::infer(Path::new("m.jsonl")), Layout::JsonlManifest);
        assert_eq!(
            Layout::infer(Path::new(env!("CARGO_MANIFEST_DIR"))),
            Layout::DirectoryPerClass
        );
    }

    proptest! {
        #[test]
        fn argmax_is_scale_invariant(
            counts in proptest::collection::vec(0u32..11, 10),
            scale in 1u32..50,
        ) {
            prop_assume!(counts.iter().any(|c| *c > 0));
            let tb = alphabetical();
            let rec = VoteRecord {
                sample_id: "s".into(),
                counts: tb.iter().cloned().zip(counts.iter().copied()).collect(),
            };
            let scaled = VoteRecord {
                sample_id: "s".into(),
                counts: rec.counts.iter().map(|(k, v)| (k.clone(), v * scale)).collect(),
            };
            prop_assert_eq!(majority_label(&rec, &tb).unwrap(), majority_label(&scaled, &tb).unwrap());
        }
    }
}
