//! Thin command-line front end over the library; see the library docs and
//! `examples/` for the programmatic API.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use shapsel::experiment::{
    cmd_explain, cmd_prep, cmd_select, cmd_synth, cmd_train, cmd_tune, run_experiment,
    ExperimentConfig,
};
use shapsel::report::merge_reports;
use shapsel::select::SweepMode;

#[derive(Parser)]
#[command(
    name = "shapsel",
    version,
    about = "SHAP-guided feature selection pipeline for binary tabular classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Scenario name, required when the config lists several.
    #[arg(long)]
    scenario: Option<String>,
    /// Override the sweep scoring mode.
    #[arg(long, value_parser = ["paper", "cv"])]
    sweep_mode: Option<String>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn load(&self) -> shapsel::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(mode) = &self.sweep_mode {
            cfg.sweep_mode = mode.parse::<SweepMode>()?;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load the dataset, prune high-missingness columns, write the audit.
    Prep(ExperimentArgs),
    /// Random hyperparameter search; writes trial history and best params.
    Tune(ExperimentArgs),
    /// Train the final model with tuned parameters; writes the model dump.
    Train(ExperimentArgs),
    /// SHAP attribution and feature ranking for the trained model.
    Explain(ExperimentArgs),
    /// Top-N feature sweep and reduced model.
    Select(ExperimentArgs),
    /// Full protocol: prep, tune, train, explain, select, report.
    Run(ExperimentArgs),
    /// Generate a synthetic dataset with ground truth.
    Synth {
        /// Generator specification (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for synthetic.csv, schema.toml, truth.json.
        #[arg(long)]
        out: PathBuf,
        /// Override the spec seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Merge experiment reports into one summary table.
    Report {
        /// report.json files to merge.
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Also write the summary to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Print to stdout, tolerating a closed pipe (`shapsel ... | head`).
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: write stdout: {e}");
        }
    }
}

macro_rules! outln {
    ($($arg:tt)*) => { emit(&format!("{}
", format_args!($($arg)*))) };
}

fn run() -> shapsel::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Prep(args) => {
            let cfg = args.load()?;
            let prep = cmd_prep(&cfg, args.scenario.as_deref())?;
            outln!(
                "pruned {} of {} feature columns (threshold {})",
                prep.dropped_columns.len(),
                prep.n_feature_columns,
                prep.threshold
            );
            for (name, frac) in &prep.dropped_columns {
                outln!("  dropped {name} ({:.1}% missing)", frac * 100.0);
            }
            for c in &prep.per_class_missing {
                outln!(
                    "  class {}: {} rows, {:.2}% missing cells",
                    c.class, c.count, c.missing_pct
                );
            }
        }
        Command::Tune(args) => {
            let cfg = args.load()?;
            let best = cmd_tune(&cfg, args.scenario.as_deref())?;
            outln!(
                "best trial {} with mean BACC {:.4}",
                best.best_trial_index, best.cv_mean_bacc
            );
        }
        Command::Train(args) => {
            let cfg = args.load()?;
            let out = cmd_train(&cfg, args.scenario.as_deref())?;
            outln!(
                "entire model on {} features: BACC {:.4}",
                out.n_features, out.metrics.bacc
            );
        }
        Command::Explain(args) => {
            let cfg = args.load()?;
            let out = cmd_explain(&cfg, args.scenario.as_deref())?;
            outln!("base value {:.6}", out.base_value);
            for (name, score) in out.ranking.entries.iter().take(10) {
                outln!("  {score:>12.6}  {name}");
            }
        }
        Command::Select(args) => {
            let cfg = args.load()?;
            let out = cmd_select(&cfg, args.scenario.as_deref())?;
            outln!(
                "best N = {} ({} mode): reduced BACC {:.4}",
                out.best_n, out.sweep_mode, out.reduced_metrics.bacc
            );
        }
        Command::Run(args) => {
            let cfg = args.load()?;
            let report = run_experiment(&cfg, args.scenario.as_deref())?;
            let summary = shapsel::report::format_summary(std::slice::from_ref(&report))?;
            emit(&summary);
            outln!("artifacts in {}", cfg.out_dir.display());
        }
        Command::Synth { config, out, seed } => {
            let output = cmd_synth(&config, &out, seed)?;
            outln!(
                "wrote {} rows to {}",
                output
                    .truth
                    .per_class_missing
                    .iter()
                    .map(|c| c.count)
                    .sum::<usize>(),
                out.display()
            );
            if let Some(bayes) = output.truth.bayes_accuracy {
                outln!("closed-form Bayes accuracy: {bayes:.4}");
            }
        }
        Command::Report { reports, out } => {
            let summary = merge_reports(&reports, out.as_deref())?;
            emit(&summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
