//! Markdown and CSV summaries shaped as a model × prompt grid with one
//! WAR/UAR column per dataset and an unweighted dataset-mean column.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::metrics::{cross_dataset_mean, format_2dp, MetricsReport, Scores};

/// What happens to samples whose query failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FailurePolicy {
    /// Leave failed samples out of every denominator.
    #[default]
    Skip,
    /// Count failed samples as `Unknown` predictions.
    ScoreAsUnknown,
}

impl std::str::FromStr for FailurePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skip" => Ok(FailurePolicy::Skip),
            "score-as-unknown" => Ok(FailurePolicy::ScoreAsUnknown),
            other => Err(format!(
                "unknown failure policy {other:?} (expected skip or score-as-unknown)"
            )),
        }
    }
}

impl std::fmt::Display for FailurePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FailurePolicy::Skip => "skip",
            FailurePolicy::ScoreAsUnknown => "score-as-unknown",
        })
    }
}

/// Scored outcome of one (model, prompt, dataset) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub model: String,
    pub prompt: String,
    pub dataset: String,
    /// Samples in the dataset after ingestion.
    pub n_samples: usize,
    pub n_failures: usize,
    pub n_unknown: u64,
    pub failure_policy: FailurePolicy,
    /// Classes left out by the dataset eval policy.
    pub policy_excluded: Vec<String>,
    /// `None` when nothing could be scored.
    pub metrics: Option<MetricsReport>,
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for s in items {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn scores(m: &MetricsReport) -> Scores {
    Scores {
        war: m.war,
        uar: m.uar,
    }
}

fn pair(s: Scores) -> String {
    format!("{}/{}", format_2dp(s.war), format_2dp(s.uar))
}

struct Grid<'a> {
    datasets: Vec<&'a str>,
    rows: Vec<(&'a str, &'a str)>,
}

impl<'a> Grid<'a> {
    fn new(cells: &'a [CellResult]) -> Self {
        let datasets = first_seen(cells.iter().map(|c| c.dataset.as_str()));
        let mut rows: Vec<(&str, &str)> = Vec::new();
        for c in cells {
            let key = (c.model.as_str(), c.prompt.as_str());
            if !rows.contains(&key) {
                rows.push(key);
            }
        }
        Grid { datasets, rows }
    }

    fn cell(
        &self,
        cells: &'a [CellResult],
        row: (&str, &str),
        dataset: &str,
    ) -> Option<&'a CellResult> {
        cells
            .iter()
            .find(|c| c.model == row.0 && c.prompt == row.1 && c.dataset == dataset)
    }

    fn dataset_size(&self, cells: &[CellResult], dataset: &str) -> usize {
        cells
            .iter()
            .filter(|c| c.dataset == dataset)
            .map(|c| c.n_samples)
            .max()
            .unwrap_or(0)
    }
}

/// Mean over the datasets of one row that produced scores.
pub fn row_mean(cells: &[CellResult], model: &str, prompt: &str) -> Option<Scores> {
    let reports: Vec<Scores> = cells
        .iter()
        .filter(|c| c.model == model && c.prompt == prompt)
        .filter_map(|c| c.metrics.as_ref().map(scores))
        .collect();
    cross_dataset_mean(&reports).ok()
}

pub fn render_markdown(cells: &[CellResult], with_baselines: bool) -> String {
    let grid = Grid::new(cells);
    let show_mean = grid.datasets.len() > 1;
    let mut out = String::new();
    let _ = writeln!(out, "# Zero-shot FER results\n");
    let _ = writeln!(out, "Cells are WAR/UAR, rounded half-up to two decimals.");
    if show_mean {
        let _ = writeln!(out, "Mean is the unweighted dataset mean.");
    }
    out.push('\n');

    let failures: usize = cells.iter().map(|c| c.n_failures).sum();
    if failures > 0 {
        let failed_cells = cells.iter().filter(|c| c.n_failures > 0).count();
        let _ = writeln!(
            out,
            "**FAILURES: {failures} sample queries failed across {failed_cells} cell(s).** \
             See the cell table for the policy applied.\n"
        );
    }

    out.push_str("| Model | Prompt |");
    for d in &grid.datasets {
        let _ = write!(out, " {d} (# {}) |", grid.dataset_size(cells, d));
    }
    if show_mean {
        out.push_str(" Mean (unweighted dataset mean) |");
    }
    out.push('\n');
    out.push_str("|---|---|");
    for _ in &grid.datasets {
        out.push_str("---|");
    }
    if show_mean {
        out.push_str("---|");
    }
    out.push('\n');
    for &row in &grid.rows {
        let _ = write!(out, "| {} | {} |", row.0, row.1);
        for d in &grid.datasets {
            let text = grid
                .cell(cells, row, d)
                .and_then(|c| c.metrics.as_ref())
                .map(|m| pair(scores(m)))
                .unwrap_or_else(|| "n/a".to_string());
            let _ = write!(out, " {text} |");
        }
        if show_mean {
            let text = row_mean(cells, row.0, row.1)
                .map(pair)
                .unwrap_or_else(|| "n/a".into());
            let _ = write!(out, " {text} |");
        }
        out.push('\n');
    }

    if with_baselines {
        render_baselines(&mut out, &grid.datasets);
    }

    out.push_str("\n## Cells\n\n");
    out.push_str("| Model | Prompt | Dataset | Samples | Scored | Failures | Failure policy | Unknown | Excluded classes |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for c in cells {
        let mut excluded: Vec<String> = c.policy_excluded.clone();
        if let Some(m) = &c.metrics {
            excluded.extend(m.excluded_classes.iter().map(|g| format!("{g} (empty)")));
        }
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            c.model,
            c.prompt,
            c.dataset,
            c.n_samples,
            c.metrics.as_ref().map_or(0, |m| m.n_total),
            c.n_failures,
            c.failure_policy,
            c.n_unknown,
            if excluded.is_empty() {
                "-".to_string()
            } else {
                excluded.join(", ")
            },
        );
    }

    out.push_str("\n## Per-class recall\n");
    for c in cells {
        let _ = writeln!(out, "\n### {} / {} / {}\n", c.model, c.prompt, c.dataset);
        match &c.metrics {
            Some(m) => {
                out.push_str("| Class | Recall |\n|---|---|\n");
                for (g, r) in &m.per_class_recall {
                    let _ = writeln!(out, "| {g} | {} |", format_2dp(*r));
                }
            }
            None => out.push_str("No scored samples.\n"),
        }
    }
    out
}

fn dataset_slot(name: &str) -> Option<usize> {
    let key: String = name
        .chars()
        .filter(|c| c.is_alphanumeric())
        .collect::<String>()
        .to_lowercase();
    match key.as_str() {
        "affectnet7" | "affectnet" => Some(0),
        "ferplus" => Some(1),
        "rafdb" => Some(2),
        _ => None,
    }
}

fn render_baselines(out: &mut String, datasets: &[&str]) {
    let slots: Vec<Option<usize>> = datasets.iter().map(|d| dataset_slot(d)).collect();
    if slots.iter().all(Option::is_none) {
        return;
    }
    out.push_str("\n### Published baselines (not reproduced)\n\n");
    out.push_str("| Model | Training set |");
    for d in datasets {
        let _ = write!(out, " {d} |");
    }
    out.push_str(" Published mean |\n|---|---|");
    for _ in datasets {
        out.push_str("---|");
    }
    out.push_str("---|\n");
    for row in PUBLISHED_RESULTS
        .iter()
        .filter(|r| r.kind == PublishedKind::Baseline)
    {
        let _ = write!(out, "| {} | {} |", row.model, row.setting);
        for slot in &slots {
            let text = slot
                .and_then(|i| row.datasets[i])
                .map(|(w, u)| pair(Scores { war: w, uar: u }))
                .unwrap_or_else(|| "-".into());
            let _ = write!(out, " {text} |");
        }
        let _ = writeln!(
            out,
            " {} |",
            pair(Scores {
                war: row.mean.0,
                uar: row.mean.1
            })
        );
    }
}

/// Full-precision CSV: one row per cell plus one `mean` row per model/prompt
/// when more than one dataset is present.
pub fn render_csv(cells: &[CellResult]) -> String {
    let grid = Grid::new(cells);
    let mut out =
        String::from("model,prompt,dataset,n_samples,n_scored,n_failures,n_unknown,war,uar\n");
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&c.model),
            csv_field(&c.prompt),
            csv_field(&c.dataset),
            c.n_samples,
            c.metrics.as_ref().map_or(0, |m| m.n_total),
            c.n_failures,
            c.n_unknown,
            opt(c.metrics.as_ref().map(|m| m.war)),
            opt(c.metrics.as_ref().map(|m| m.uar)),
        );
    }
    if grid.datasets.len() > 1 {
        for &row in &grid.rows {
            let mean = row_mean(cells, row.0, row.1);
            let _ = writeln!(
                out,
                "{},{},mean,,,,,{},{}",
                csv_field(row.0),
                csv_field(row.1),
                opt(mean.map(|s| s.war)),
                opt(mean.map(|s| s.uar)),
            );
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PublishedKind {
    /// Supervised or CLIP-based reference models.
    Baseline,
    /// Zero-shot VQA rows.
    Vlm,
}

/// One published results row: WAR/UAR for AffectNet7, FERPlus and RAF-DB
/// (`None` where the test set matched the training set) and the printed mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRow {
    pub kind: PublishedKind,
    pub model: &'static str,
    /// Training set for baselines, question id for VLM rows.
    pub setting: &'static str,
    pub datasets: [Option<(f64, f64)>; 3],
    pub mean: (f64, f64),
}

macro_rules! row {
    ($kind:ident, $model:expr, $setting:expr, [$($d:tt),*], $mw:expr, $mu:expr) => {
        PublishedRow {
            kind: PublishedKind::$kind,
            model: $model,
            setting: $setting,
            datasets: [$(row!(@cell $d)),*],
            mean: ($mw, $mu),
        }
    };
    (@cell -) => { None };
    (@cell ($w:expr, $u:expr)) => { Some(($w, $u)) };
}

/// Published zero-shot results used as static comparison constants.
pub const PUBLISHED_RESULTS: &[PublishedRow] = &[
    row!(Baseline, "ResEmoteNet", "AffectNet7", [-, (0.12, 0.08), (0.15, 0.16)], 0.14, 0.12),
    row!(Baseline, "ResEmoteNet", "FER13", [(0.31, 0.31), -, (0.50, 0.34)], 0.41, 0.33),
    row!(Baseline, "ResEmoteNet", "RAF-DB", [(0.27, 0.27), (0.35, 0.21), -], 0.31, 0.24),
    row!(
        Baseline,
        "Exp-CLIP",
        "CAER-S",
        [(0.44, 0.44), (0.55, 0.48), (0.59, 0.65)],
        0.53,
        0.52
    ),
    row!(
        Vlm,
        "BLIP-2 OPT",
        "emoq0",
        [(0.27, 0.27), (0.38, 0.21), (0.47, 0.31)],
        0.37,
        0.26
    ),
    row!(
        Vlm,
        "BLIP-2 OPT",
        "emoq1",
        [(0.33, 0.33), (0.57, 0.30), (0.67, 0.44)],
        0.52,
        0.36
    ),
    row!(
        Vlm,
        "BLIP-2 OPT",
        "emoq2",
        [(0.32, 0.32), (0.44, 0.26), (0.62, 0.42)],
        0.46,
        0.33
    ),
    row!(
        Vlm,
        "BLIP-2 OPT",
        "emoq3",
        [(0.28, 0.28), (0.39, 0.24), (0.57, 0.35)],
        0.41,
        0.29
    ),
    row!(
        Vlm,
        "BLIP-2 FLANT5XL",
        "emoq0",
        [(0.21, 0.21), (0.38, 0.21), (0.47, 0.39)],
        0.35,
        0.27
    ),
    row!(
        Vlm,
        "BLIP-2 FLANT5XL",
        "emoq1",
        [(0.33, 0.33), (0.57, 0.30), (0.59, 0.43)],
        0.50,
        0.35
    ),
    row!(
        Vlm,
        "BLIP-2 FLANT5XL",
        "emoq2",
        [(0.34, 0.34), (0.44, 0.26), (0.59, 0.43)],
        0.46,
        0.34
    ),
    row!(
        Vlm,
        "BLIP-2 FLANT5XL",
        "emoq3",
        [(0.34, 0.34), (0.39, 0.24), (0.58, 0.43)],
        0.44,
        0.34
    ),
    row!(
        Vlm,
        "Florence-VL base-ft",
        "emoq0",
        [(0.13, 0.13), (0.35, 0.11), (0.22, 0.15)],
        0.23,
        0.13
    ),
    row!(
        Vlm,
        "Florence-VL base-ft",
        "emoq1",
        [(0.27, 0.27), (0.50, 0.18), (0.52, 0.31)],
        0.43,
        0.25
    ),
    row!(
        Vlm,
        "Florence-VL base-ft",
        "emoq2",
        [(0.26, 0.26), (0.48, 0.17), (0.50, 0.31)],
        0.41,
        0.25
    ),
    row!(
        Vlm,
        "Florence-VL base-ft",
        "emoq3",
        [(0.16, 0.16), (0.36, 0.12), (0.30, 0.19)],
        0.27,
        0.16
    ),
    row!(
        Vlm,
        "Florence-VL large-ft",
        "emoq0",
        [(0.14, 0.14), (0.35, 0.11), (0.22, 0.14)],
        0.24,
        0.13
    ),
    row!(
        Vlm,
        "Florence-VL large-ft",
        "emoq1",
        [(0.38, 0.38), (0.64, 0.30), (0.62, 0.46)],
        0.55,
        0.38
    ),
    row!(
        Vlm,
        "Florence-VL large-ft",
        "emoq2",
        [(0.36, 0.36), (0.63, 0.30), (0.61, 0.44)],
        0.53,
        0.37
    ),
    row!(
        Vlm,
        "Florence-VL large-ft",
        "emoq3",
        [(0.37, 0.37), (0.62, 0.27), (0.62, 0.45)],
        0.54,
        0.36
    ),
    row!(
        Vlm,
        "LLAMA 3.2 11B",
        "emoq0",
        [(0.38, 0.38), (0.60, 0.36), (0.68, 0.54)],
        0.55,
        0.43
    ),
    row!(
        Vlm,
        "LLAMA 3.2 11B",
        "emoq1",
        [(0.41, 0.41), (0.68, 0.38), (0.73, 0.58)],
        0.61,
        0.46
    ),
    row!(
        Vlm,
        "LLAMA 3.2 11B",
        "emoq2",
        [(0.41, 0.41), (0.67, 0.38), (0.73, 0.58)],
        0.60,
        0.46
    ),
    row!(
        Vlm,
        "LLAMA 3.2 11B",
        "emoq3",
        [(0.43, 0.43), (0.66, 0.39), (0.73, 0.60)],
        0.61,
        0.47
    ),
    row!(
        Vlm,
        "PaliGemma 3b-mix-224",
        "emoq0",
        [(0.40, 0.40), (0.70, 0.44), (0.73, 0.56)],
        0.61,
        0.47
    ),
    row!(
        Vlm,
        "PaliGemma 3b-mix-224",
        "emoq1",
        [(0.33, 0.33), (0.61, 0.40), (0.69, 0.55)],
        0.54,
        0.43
    ),
    row!(
        Vlm,
        "PaliGemma 3b-mix-224",
        "emoq2",
        [(0.36, 0.36), (0.57, 0.39), (0.67, 0.56)],
        0.53,
        0.44
    ),
    row!(
        Vlm,
        "PaliGemma 3b-mix-224",
        "emoq3",
        [(0.36, 0.36), (0.58, 0.40), (0.66, 0.55)],
        0.53,
        0.44
    ),
    row!(
        Vlm,
        "PaliGemma 3b-mix-448",
        "emoq0",
        [(0.48, 0.48), (0.63, 0.42), (0.77, 0.62)],
        0.63,
        0.51
    ),
    row!(
        Vlm,
        "PaliGemma 3b-mix-448",
        "emoq1",
        [(0.28, 0.28), (0.54, 0.37), (0.64, 0.53)],
        0.49,
        0.39
    ),
    row!(
        Vlm,
        "PaliGemma 3b-mix-448",
        "emoq2",
        [(0.29, 0.29), (0.52, 0.37), (0.64, 0.53)],
        0.48,
        0.40
    ),
    row!(
        Vlm,
        "PaliGemma 3b-mix-448",
        "emoq3",
        [(0.23, 0.23), (0.50, 0.37), (0.58, 0.50)],
        0.44,
        0.37
    ),
];
