//! `run` and `report`: evaluate the model × prompt × dataset grid and
//! (re)score stored answers.
//!
//! Output directory layout:
//!
//! ```text
//! <out>/config.resolved.toml
//! <out>/lexicon.txt                 resolved lexicon used for scoring
//! <out>/report.md, report.csv
//! <out>/cells/<NNN>_<model>__<prompt>__<dataset>/
//!     cell.json  answers.jsonl  failures.jsonl  confusion.csv  metrics.csv
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use futures::StreamExt;
use serde::{Deserialize, Serialize};

use crate::backend::{build_backend, run_inference, ResponseCache, RunRecord, VisionBackend};
use crate::datasets::{load_dataset, Dataset};
use crate::lexicon::{load_lexicon, Lexicon, LexiconSource, Precedence};
use crate::metrics::{ConfusionMatrix, MetricsReport};
use crate::prompting::{PromptCatalog, PromptSpec};
use crate::report::{render_csv, render_markdown, CellResult, FailurePolicy};
use crate::vocab::{GroundTruthLabel, PredictedClass};

use super::config::RunConfig;
use super::CliError;

const LEXICON_SNAPSHOT: &str = "lexicon.txt";
const CONFIG_SNAPSHOT: &str = "config.resolved.toml";

/// Per-cell metadata, enough to rescore without the original config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellMeta {
    pub order: usize,
    pub run_id: String,
    pub model: String,
    pub prompt: PromptSpec,
    pub dataset: String,
    pub gt_classes: Vec<String>,
    pub policy_excluded: Vec<String>,
    pub failure_policy: FailurePolicy,
    pub n_samples: usize,
}

/// One line of `answers.jsonl`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnswerRow {
    pub sample_id: String,
    pub gt: String,
    pub digest: String,
    pub model: String,
    pub prompt_id: String,
    pub answer_text: String,
    pub latency: f64,
    pub fetched_at: String,
    pub from_cache: bool,
    pub prediction: PredictedClass,
    pub matched_synonym: Option<String>,
}

/// One line of `failures.jsonl`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureRow {
    pub sample_id: String,
    pub gt: String,
    pub error: String,
}

/// Everything `cmd_run` produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub records: Vec<RunRecord>,
    pub cells: Vec<CellResult>,
    pub report_markdown: String,
}

impl RunOutcome {
    /// Cells in which every sample failed.
    pub fn dead_cells(&self) -> Vec<&CellResult> {
        self.cells
            .iter()
            .zip(&self.records)
            .filter(|(c, r)| c.n_samples > 0 && r.answers.is_empty())
            .map(|(c, _)| c)
            .collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.dead_cells().is_empty() {
            0
        } else {
            1
        }
    }
}

/// Scores one cell from `(gt, answer text)` pairs and the GT labels of
/// failed samples. Shared by `run` and `report` so both agree exactly.
pub fn score_cell(
    meta: &CellMeta,
    answers: &[(String, String)],
    failed_gts: &[String],
    lexicon: &Lexicon,
) -> Result<(CellResult, ConfusionMatrix), CliError> {
    let classes: Vec<GroundTruthLabel> = meta
        .gt_classes
        .iter()
        .map(|g| GroundTruthLabel::new(g))
        .collect();
    let mut pairs: Vec<(&str, PredictedClass)> = answers
        .iter()
        .map(|(gt, text)| (gt.as_str(), lexicon.map_answer(text).class))
        .collect();
    if meta.failure_policy == FailurePolicy::ScoreAsUnknown {
        pairs.extend(
            failed_gts
                .iter()
                .map(|g| (g.as_str(), PredictedClass::Unknown)),
        );
    }
    let cm = ConfusionMatrix::accumulate(classes, pairs).map_err(|e| {
        CliError::Runtime(format!(
            "cell {}/{}/{}: {e}",
            meta.model, meta.prompt.name, meta.dataset
        ))
    })?;
    let metrics = MetricsReport::from_matrix(&cm).ok();
    let cell = CellResult {
        model: meta.model.clone(),
        prompt: meta.prompt.name.clone(),
        dataset: meta.dataset.clone(),
        n_samples: meta.n_samples,
        n_failures: failed_gts.len(),
        n_unknown: cm.unknown_total(),
        failure_policy: meta.failure_policy,
        policy_excluded: meta.policy_excluded.clone(),
        metrics,
    };
    Ok((cell, cm))
}

pub fn metrics_csv(cell: &CellResult, cm: &ConfusionMatrix) -> String {
    let mut out = String::from("metric,class,n,value\n");
    for (g, row) in cm.rows() {
        let n: u64 = row.iter().sum();
        let value = cm
            .recall(g.as_str())
            .map(|r| r.to_string())
            .unwrap_or_default();
        let _ = writeln!(out, "recall,{g},{n},{value}");
    }
    let (uar, war) = cell
        .metrics
        .as_ref()
        .map(|m| (m.uar.to_string(), m.war.to_string()))
        .unwrap_or_default();
    let _ = writeln!(out, "uar,,{},{uar}", cm.n_total());
    let _ = writeln!(out, "war,,{},{war}", cm.n_total());
    out
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
}

fn jsonl<T: Serialize>(rows: &[T]) -> String {
    rows.iter()
        .map(|r| serde_json::to_string(r).expect("rows serialize") + "\n")
        .collect()
}

fn load_run_lexicon(cfg: &RunConfig) -> Result<Lexicon, CliError> {
    let (lexicon, conflicts) = load_lexicon(&cfg.lexicon.source(), &cfg.lexicon.precedence())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    for c in &conflicts {
        log::info!(
            "lexicon conflict: {:?} claimed by {:?}, resolved to {}",
            c.synonym,
            c.claimants,
            c.resolution
        );
    }
    Ok(lexicon)
}

fn resolve_prompts(cfg: &RunConfig) -> Result<Vec<PromptSpec>, CliError> {
    let catalog = match &cfg.prompt_file {
        Some(p) => PromptCatalog::from_file(p).map_err(|e| CliError::Usage(e.to_string()))?,
        None => PromptCatalog::builtin(),
    };
    cfg.prompts
        .iter()
        .map(|p| {
            catalog
                .resolve(p)
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect()
}

/// Runs the configured grid, writing artifacts under `cfg.out_dir`.
///
/// Everything that can be checked before contacting a backend (prompts,
/// lexicon, datasets, backend config) is validated first; those failures
/// are usage errors.
pub async fn cmd_run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let prompts = resolve_prompts(cfg)?;
    let lexicon = load_run_lexicon(cfg)?;
    let datasets: Vec<Dataset> = cfg
        .datasets
        .iter()
        .map(|d| load_dataset(&d.to_spec()).map_err(|e| CliError::Usage(e.to_string())))
        .collect::<Result<_, _>>()?;
    let backend: Arc<dyn VisionBackend> =
        build_backend(&cfg.backend).map_err(|e| CliError::Usage(e.to_string()))?;
    cmd_run_with_backend(cfg, backend, &prompts, &lexicon, &datasets).await
}

/// Same as [`cmd_run`] with an injected backend and pre-loaded inputs.
pub async fn cmd_run_with_backend(
    cfg: &RunConfig,
    backend: Arc<dyn VisionBackend>,
    prompts: &[PromptSpec],
    lexicon: &Lexicon,
    datasets: &[Dataset],
) -> Result<RunOutcome, CliError> {
    let cache =
        ResponseCache::open(&cfg.cache_dir).map_err(|e| CliError::Runtime(e.to_string()))?;
    let out = &cfg.out_dir;
    let cells_dir = out.join("cells");
    fs::create_dir_all(&cells_dir)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", cells_dir.display())))?;
    write(&out.join(CONFIG_SNAPSHOT), &cfg.to_toml())?;
    write(&out.join(LEXICON_SNAPSHOT), &lexicon.to_file_format())?;

    let grid: Vec<(&PromptSpec, &Dataset)> = prompts
        .iter()
        .flat_map(|p| datasets.iter().map(move |d| (p, d)))
        .collect();

    let records: Vec<RunRecord> = futures::stream::iter(grid.iter())
        .map(|(prompt, dataset)| {
            let backend = Arc::clone(&backend);
            let cache = &cache;
            async move {
                log::info!(
                    "running {} / {} / {} ({} samples)",
                    cfg.backend.model,
                    prompt.name,
                    dataset.name(),
                    dataset.len()
                );
                run_inference(backend.as_ref(), &cfg.backend, dataset, prompt, cache).await
            }
        })
        .buffered(cfg.jobs)
        .collect::<Vec<_>>()
        .await
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut cells = Vec::new();
    for (order, ((prompt, dataset), record)) in grid.iter().zip(&records).enumerate() {
        let meta = CellMeta {
            order,
            run_id: record.run_id.clone(),
            model: cfg.backend.model.clone(),
            prompt: (*prompt).clone(),
            dataset: dataset.name().to_string(),
            gt_classes: dataset
                .spec
                .scored_classes()
                .iter()
                .map(|g| g.to_string())
                .collect(),
            policy_excluded: dataset
                .spec
                .excluded_classes()
                .iter()
                .map(|g| g.to_string())
                .collect(),
            failure_policy: cfg.failure_policy,
            n_samples: dataset.len(),
        };
        let gt_of = |id: &str| {
            dataset
                .samples
                .iter()
                .find(|s| s.id == id)
                .map(|s| s.gt.to_string())
                .unwrap_or_default()
        };
        let answer_rows: Vec<AnswerRow> = record
            .answers
            .iter()
            .map(|a| {
                let p = lexicon.map_answer(&a.answer_text);
                AnswerRow {
                    sample_id: a.sample_id.clone(),
                    gt: gt_of(&a.sample_id),
                    digest: a.digest.clone(),
                    model: a.model.clone(),
                    prompt_id: a.prompt_id.clone(),
                    answer_text: a.answer_text.clone(),
                    latency: a.latency,
                    fetched_at: a.fetched_at.clone(),
                    from_cache: a.from_cache,
                    prediction: p.class,
                    matched_synonym: p.matched_synonym,
                }
            })
            .collect();
        let failure_rows: Vec<FailureRow> = record
            .failures
            .iter()
            .map(|f| FailureRow {
                sample_id: f.sample_id.clone(),
                gt: gt_of(&f.sample_id),
                error: f.error.clone(),
            })
            .collect();

        let dir = cells_dir.join(cell_dir_name(&meta));
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
        write(
            &dir.join("cell.json"),
            &(serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n"),
        )?;
        write(&dir.join("answers.jsonl"), &jsonl(&answer_rows))?;
        write(&dir.join("failures.jsonl"), &jsonl(&failure_rows))?;

        let (cell, cm) = score_rows(&meta, &answer_rows, &failure_rows, lexicon)?;
        write(&dir.join("confusion.csv"), &cm.to_csv())?;
        write(&dir.join("metrics.csv"), &metrics_csv(&cell, &cm))?;
        cells.push(cell);
    }

    let report_markdown = render_markdown(&cells, cfg.with_baselines);
    write(&out.join("report.md"), &report_markdown)?;
    write(&out.join("report.csv"), &render_csv(&cells))?;
    Ok(RunOutcome {
        out_dir: out.clone(),
        records,
        cells,
        report_markdown,
    })
}

fn cell_dir_name(meta: &CellMeta) -> String {
    format!(
        "{:03}_{}__{}__{}",
        meta.order,
        sanitize(&meta.model),
        sanitize(&meta.prompt.name),
        sanitize(&meta.dataset)
    )
}

fn score_rows(
    meta: &CellMeta,
    answers: &[AnswerRow],
    failures: &[FailureRow],
    lexicon: &Lexicon,
) -> Result<(CellResult, ConfusionMatrix), CliError> {
    let pairs: Vec<(String, String)> = answers
        .iter()
        .map(|a| (a.gt.clone(), a.answer_text.clone()))
        .collect();
    let failed: Vec<String> = failures.iter().map(|f| f.gt.clone()).collect();
    score_cell(meta, &pairs, &failed, lexicon)
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    /// Rescore with this lexicon instead of the run's snapshot.
    pub lexicon: Option<PathBuf>,
    /// Override the run's baseline setting.
    pub with_baselines: Option<bool>,
}

/// Result of rescoring an artifacts directory.
#[derive(Debug)]
pub struct ReportOutcome {
    pub cells: Vec<CellResult>,
    pub report_markdown: String,
    pub report_csv: String,
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::Runtime(format!("reading {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line =
            line.map_err(|e| CliError::Runtime(format!("reading {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| {
            CliError::Runtime(format!("{}:{}: corrupt line: {e}", path.display(), idx + 1))
        })?;
        out.push(row);
    }
    Ok(out)
}

/// Recomputes every cell under `dir` from its stored answers. No network.
pub fn cmd_report(dir: &Path, opts: &ReportOptions) -> Result<ReportOutcome, CliError> {
    let cells_dir = dir.join("cells");
    let mut cell_dirs: Vec<PathBuf> = fs::read_dir(&cells_dir)
        .map_err(|e| CliError::Usage(format!("{} is not a run directory: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("cell.json").is_file())
        .collect();
    cell_dirs.sort();
    if cell_dirs.is_empty() {
        return Err(CliError::Usage(format!(
            "{} holds no completed run cells",
            cells_dir.display()
        )));
    }

    let lexicon_path = opts
        .lexicon
        .clone()
        .unwrap_or_else(|| dir.join(LEXICON_SNAPSHOT));
    let (lexicon, _) = load_lexicon(&LexiconSource::File(lexicon_path), &Precedence::default())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let with_baselines = match opts.with_baselines {
        Some(b) => b,
        None => fs::read_to_string(dir.join(CONFIG_SNAPSHOT))
            .ok()
            .and_then(|t| RunConfig::from_toml(&t).ok())
            .is_some_and(|c| c.with_baselines),
    };

    let mut metas = Vec::new();
    for d in &cell_dirs {
        let path = d.join("cell.json");
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Runtime(format!("reading {}: {e}", path.display())))?;
        let meta: CellMeta = serde_json::from_str(&text).map_err(|e| {
            CliError::Runtime(format!("{}: corrupt cell metadata: {e}", path.display()))
        })?;
        metas.push((meta, d));
    }
    metas.sort_by_key(|(m, _)| m.order);

    let mut cells = Vec::new();
    for (meta, d) in metas {
        let answers: Vec<AnswerRow> = read_jsonl(&d.join("answers.jsonl"))?;
        let failures_path = d.join("failures.jsonl");
        let failures: Vec<FailureRow> = if failures_path.exists() {
            read_jsonl(&failures_path)?
        } else {
            Vec::new()
        };
        let (cell, cm) = score_rows(&meta, &answers, &failures, &lexicon)?;
        write(&d.join("confusion.csv"), &cm.to_csv())?;
        write(&d.join("metrics.csv"), &metrics_csv(&cell, &cm))?;
        cells.push(cell);
    }

    let report_markdown = render_markdown(&cells, with_baselines);
    let report_csv = render_csv(&cells);
    write(&dir.join("report.md"), &report_markdown)?;
    write(&dir.join("report.csv"), &report_csv)?;
    Ok(ReportOutcome {
        cells,
        report_markdown,
        report_csv,
    })
}
