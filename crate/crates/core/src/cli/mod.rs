//! Command-line front end: argument parsing and the subcommand handlers.

pub mod config;
pub mod convert;
pub mod run;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::backend::{BackendKind, CacheFileSummary, ResponseCache};
use crate::lexicon::{load_lexicon, LexiconSource, Precedence};
use crate::report::FailurePolicy;
use crate::vocab::Prediction;

pub use config::{DatasetConfig, LexiconConfig, RunConfig};
pub use convert::{cmd_convert, ConvertOutcome};
pub use run::{
    cmd_report, cmd_run, cmd_run_with_backend, ReportOptions, ReportOutcome, RunOutcome,
};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config, or inputs detected before any work started.
    #[error("{0}")]
    Usage(String),
    /// Failure while running (I/O, corrupt artifacts, dead backend).
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fer-probe",
    version,
    about = "Zero-shot facial expression recognition with vision-language models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Query a model over a prompt × dataset grid and score the answers.
    Run(Box<RunArgs>),
    /// Rescore a run directory from its stored answers (no network).
    Report(ReportArgs),
    /// Show how one answer maps through the lexicon.
    Normalize(NormalizeArgs),
    /// Write a JSONL manifest for a class-folder tree or a vote CSV.
    Convert(ConvertArgs),
    /// Inspect or clear the answer cache.
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "KIND")]
    pub backend_kind: Option<BackendKind>,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// emoq0..emoq3, a prompt-file key, or custom:<text>. Repeatable.
    #[arg(long = "prompt", value_name = "ID")]
    pub prompts: Vec<String>,
    /// TOML table of named custom prompts.
    #[arg(long)]
    pub prompt_file: Option<PathBuf>,
    /// NAME=PATH (or PATH). Repeatable.
    #[arg(long = "dataset", value_name = "NAME=PATH")]
    pub datasets: Vec<String>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long = "out")]
    pub out_dir: Option<PathBuf>,
    /// Cells evaluated concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Requests in flight per cell.
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long, value_name = "skip|score-as-unknown")]
    pub failure_policy: Option<FailurePolicy>,
    /// JSONL script for the mock backend.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// Append the published baseline rows to the report.
    #[arg(long)]
    pub baselines: bool,
}

impl RunArgs {
    /// Loads `--config` (if any) and applies flag overrides. Relative flag
    /// paths stay relative to the working directory.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(k) = self.backend_kind {
            cfg.backend.kind = k;
        }
        if let Some(e) = self.endpoint {
            cfg.backend.endpoint = e;
        }
        if let Some(m) = self.model {
            cfg.backend.model = m;
        }
        if let Some(p) = self.parallelism {
            cfg.backend.parallelism = p;
        }
        if let Some(f) = self.fixture {
            cfg.backend.fixture = Some(f);
        }
        if !self.prompts.is_empty() {
            cfg.prompts = self.prompts;
        }
        if let Some(p) = self.prompt_file {
            cfg.prompt_file = Some(p);
        }
        if !self.datasets.is_empty() {
            cfg.datasets = self
                .datasets
                .iter()
                .map(|d| DatasetConfig::from_flag(d))
                .collect::<Result<_, _>>()?;
        }
        if let Some(l) = self.lexicon {
            cfg.lexicon.path = Some(l);
        }
        if let Some(c) = self.cache_dir {
            cfg.cache_dir = c;
        }
        if let Some(o) = self.out_dir {
            cfg.out_dir = o;
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        if let Some(f) = self.failure_policy {
            cfg.failure_policy = f;
        }
        if self.baselines {
            cfg.with_baselines = true;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A directory written by `run`.
    pub dir: PathBuf,
    /// Rescore with a different lexicon file.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Include the published baseline rows.
    #[arg(long, conflicts_with = "no_baselines")]
    pub baselines: bool,
    #[arg(long)]
    pub no_baselines: bool,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Free-text answer (several words are joined with spaces).
    #[arg(required = true, num_args = 1..)]
    pub answer: Vec<String>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Class-folder root or vote CSV.
    pub input: PathBuf,
    /// Output manifest path.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CacheCommand {
    /// List cache files with their entry counts.
    Ls(CacheDirArg),
    /// Delete cache files, optionally only for one model and/or prompt.
    Purge {
        #[command(flatten)]
        dir: CacheDirArg,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        prompt: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct CacheDirArg {
    #[arg(long, default_value = "fer-cache")]
    pub cache_dir: PathBuf,
}

/// Maps one answer with the chosen lexicon.
pub fn cmd_normalize(answer: &str, lexicon: Option<&Path>) -> Result<Prediction, CliError> {
    let source = match lexicon {
        Some(p) => LexiconSource::File(p.to_path_buf()),
        None => LexiconSource::BuiltIn,
    };
    let (lexicon, _) = load_lexicon(&source, &Precedence::default())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(lexicon.map_answer(answer))
}

/// One-line rendering used by `normalize`.
pub fn describe_prediction(p: &Prediction) -> String {
    match &p.matched_synonym {
        Some(m) => format!("{} (matched {m:?})", p.class.name()),
        None => format!("{} (no match)", p.class.name()),
    }
}

pub fn cmd_cache_ls(dir: &Path) -> Result<Vec<CacheFileSummary>, CliError> {
    let cache = ResponseCache::open(dir).map_err(|e| CliError::Runtime(e.to_string()))?;
    cache.list().map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn cmd_cache_purge(
    dir: &Path,
    model: Option<&str>,
    prompt: Option<&str>,
) -> Result<Vec<PathBuf>, CliError> {
    let cache = ResponseCache::open(dir).map_err(|e| CliError::Runtime(e.to_string()))?;
    cache
        .purge(model, prompt)
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// Runs a parsed command line, printing results to stdout. Returns the
/// process exit code.
pub async fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = (*args).into_config()?;
            let outcome = cmd_run(&cfg).await?;
            print!("{}", grid_only(&outcome.report_markdown));
            println!("artifacts: {}", outcome.out_dir.display());
            for cell in outcome.dead_cells() {
                eprintln!(
                    "error: every sample failed for {} / {} / {}",
                    cell.model, cell.prompt, cell.dataset
                );
            }
            Ok(outcome.exit_code())
        }
        Command::Report(args) => {
            let opts = ReportOptions {
                lexicon: args.lexicon,
                with_baselines: match (args.baselines, args.no_baselines) {
                    (true, _) => Some(true),
                    (_, true) => Some(false),
                    _ => None,
                },
            };
            let outcome = cmd_report(&args.dir, &opts)?;
            print!("{}", outcome.report_markdown);
            Ok(0)
        }
        Command::Normalize(args) => {
            let p = cmd_normalize(&args.answer.join(" "), args.lexicon.as_deref())?;
            println!("{}", describe_prediction(&p));
            Ok(0)
        }
        Command::Convert(args) => {
            let outcome = cmd_convert(&args.input, args.out.as_deref())?;
            println!(
                "wrote {} rows to {}",
                outcome.rows,
                outcome.manifest.display()
            );
            Ok(0)
        }
        Command::Cache(CacheCommand::Ls(d)) => {
            for f in cmd_cache_ls(&d.cache_dir)? {
                println!(
                    "{}\t{}\t{}\t{}",
                    f.model,
                    f.prompt_id,
                    f.entries,
                    f.path.display()
                );
            }
            Ok(0)
        }
        Command::Cache(CacheCommand::Purge { dir, model, prompt }) => {
            let removed = cmd_cache_purge(&dir.cache_dir, model.as_deref(), prompt.as_deref())?;
            println!("removed {} cache file(s)", removed.len());
            Ok(0)
        }
    }
}

/// The results grid: everything up to the per-cell details.
fn grid_only(markdown: &str) -> &str {
    markdown.split("\n## Cells").next().unwrap_or(markdown)
}
