//! `vcurate`: normalize, curate, sample and measure function-level
//! vulnerability corpora stored as line-delimited JSON.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vcurate::Averaging;

/// Exit status for a failed run.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub const IO: u8 = 2;
    pub const INSUFFICIENT_CLASS: u8 = 3;
    pub const VALIDATION: u8 = 4;

    pub fn io(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: Self::IO,
            error: error.into(),
        }
    }

    pub fn validation(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: Self::VALIDATION,
            error: error.into(),
        }
    }
}

pub type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "vcurate", version, about = "Curate function-level C/C++ vulnerability datasets")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores). Never changes output.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize every function and add vc_ enrichment fields.
    Normalize(NormalizeArgs),
    /// Drop comment-only, duplicated and label-conflicting records.
    Curate(CurateArgs),
    /// Draw a balanced subset and split it into train/validation/test.
    SampleSplit(SampleSplitArgs),
    /// Token-length statistics and label distribution.
    Stats(StatsArgs),
    /// Accuracy, precision, recall and F1 of a predictions file.
    Metrics(MetricsArgs),
    /// Merge stats, curation and metrics outputs into one report.
    Report(ReportArgs),
}

#[derive(Args)]
pub struct NormalizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Load diagnostics and per-status counts as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct CurateArgs {
    /// Enriched corpus; records without vc_ fields are normalized on the fly.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Curation counts as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct SampleSplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Directory receiving subset.jsonl, the three split files and split_manifest.json.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Records drawn from each class; the whole corpus is split when omitted.
    #[arg(long)]
    pub per_class: Option<usize>,
    #[arg(long, default_value_t = 0.70)]
    pub train: f64,
    #[arg(long, default_value_t = 0.15)]
    pub val: f64,
    #[arg(long, default_value_t = 0.15)]
    pub test: f64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CounterArg {
    /// Code tokens, comments excluded.
    Lexical,
    /// Code tokens plus one per comment.
    Surface,
}

#[derive(Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..))]
    pub limit: u64,
    /// Measure vc_normalized instead of the raw function.
    #[arg(long)]
    pub processed: bool,
    /// Precomputed per-record counts: lines of {"index": i, "tokens": n}.
    #[arg(long, conflicts_with = "counter")]
    pub counts_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub counter: Option<CounterArg>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum AveragingArg {
    PositiveClass,
    Macro,
}

impl From<AveragingArg> for Averaging {
    fn from(a: AveragingArg) -> Self {
        match a {
            AveragingArg::PositiveClass => Averaging::PositiveClass,
            AveragingArg::Macro => Averaging::Macro,
        }
    }
}

#[derive(Args)]
pub struct MetricsArgs {
    /// Predictions: lines of {"index": i, "prediction": 0|1}.
    #[arg(long)]
    pub input: PathBuf,
    /// Corpus whose `target` fields are the ground truth, indexed by record position.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, value_enum, default_value = "positive-class")]
    pub averaging: AveragingArg,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("sections").required(true).multiple(true))]
pub struct ReportArgs {
    /// Output of `stats --output`.
    #[arg(long, group = "sections")]
    pub stats: Option<PathBuf>,
    /// Output of `curate --report`.
    #[arg(long, group = "sections")]
    pub curation: Option<PathBuf>,
    /// Output of `metrics --output`.
    #[arg(long, group = "sections")]
    pub metrics: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// Also write a human-readable rendering here.
    #[arg(long)]
    pub text: Option<PathBuf>,
}

fn run(cli: Cli) -> CmdResult {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.into())
            .build_global()
            .map_err(Failure::io)?;
    }
    match cli.command {
        Command::Normalize(a) => commands::normalize(a),
        Command::Curate(a) => commands::curate(a),
        Command::SampleSplit(a) => commands::sample_split(a),
        Command::Stats(a) => commands::stats(a),
        Command::Metrics(a) => commands::metrics(a),
        Command::Report(a) => commands::report(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let mut message = f.error.to_string();
            for cause in f.error.chain().skip(1) {
                let cause = cause.to_string();
                if !message.contains(&cause) {
                    message = format!("{message}: {cause}");
                }
            }
            eprintln!("error: {message}");
            ExitCode::from(f.code)
        }
    }
}
