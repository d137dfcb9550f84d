//! `popsi` command-line front end.

mod commands;
mod config;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use popsi::baselines::EvalSplit;

use crate::config::{parse_delimiter, RunConfig};

#[derive(Parser)]
#[command(name = "popsi", version, about = "Popularity-aware top-K recommendation from multi-behavior implicit feedback")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand. Each one overrides the configuration file.
#[derive(Args)]
struct Overrides {
    /// Configuration file (`key = value` lines). Defaults to `<out>/config.txt` when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Raw interaction log to ingest.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Field delimiter: a single character, `tab` or `space`.
    #[arg(long, global = true)]
    delimiter: Option<String>,
    /// The input starts with a header line.
    #[arg(long, global = true)]
    header: bool,
    /// Column layout, e.g. `user,item,behavior,ts`.
    #[arg(long, global = true)]
    columns: Option<String>,
    /// Behavior labels to keep (comma-separated); others are skipped with a warning.
    #[arg(long, global = true)]
    behaviors: Option<String>,
    #[arg(long = "target-behavior", global = true)]
    target_behavior: Option<String>,
    /// Slice rank.
    #[arg(long, global = true)]
    r: Option<usize>,
    /// Fraction of items labelled popular.
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Ignore auxiliary behaviors.
    #[arg(long = "no-si", global = true)]
    no_si: bool,
    /// Skip the popularity constraint.
    #[arg(long = "no-pop", global = true)]
    no_pop: bool,
    /// Cutoff K; repeat or comma-separate for several.
    #[arg(long, global = true, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run directory holding every artifact.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a log into the run directory (tensor, indices, stats).
    Ingest,
    /// Split the ingested data and fit a model.
    Fit,
    /// Score a held-out split and write an evaluation report.
    Evaluate {
        /// `test` or `val`.
        #[arg(long, default_value = "test")]
        split: EvalSplit,
        /// Fit and evaluate a named strategy instead of the saved model.
        #[arg(long)]
        variant: Option<String>,
    },
    /// Print top-K items for the given users.
    Recommend {
        #[arg(long = "user", required = true, value_delimiter = ',')]
        users: Vec<String>,
    },
    /// Fit and evaluate once per grid value of r and/or p.
    Sweep {
        #[arg(long = "sweep-r", value_delimiter = ',')]
        ranks: Vec<usize>,
        #[arg(long = "sweep-p", value_delimiter = ',')]
        fractions: Vec<f64>,
        #[arg(long, default_value = "val")]
        split: EvalSplit,
    },
}

fn resolve(o: &Overrides) -> Result<RunConfig> {
    let mut cfg = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => {
            let out = o.out.clone().unwrap_or_else(|| RunConfig::default().out);
            let saved = out.join(workspace::CONFIG);
            if saved.exists() {
                RunConfig::load(&saved)?
            } else {
                RunConfig::default()
            }
        }
    };
    if let Some(v) = &o.input {
        cfg.input = Some(v.clone());
    }
    if let Some(v) = &o.delimiter {
        cfg.delimiter = parse_delimiter(v)?;
    }
    if o.header {
        cfg.header = true;
    }
    if let Some(v) = &o.columns {
        cfg.set("columns", v)?;
    }
    if let Some(v) = &o.behaviors {
        cfg.set("behaviors", v)?;
    }
    if let Some(v) = &o.target_behavior {
        cfg.target_behavior = v.clone();
    }
    if let Some(v) = o.r {
        cfg.r = v;
    }
    if let Some(v) = o.p {
        cfg.p = v;
    }
    if o.no_si {
        cfg.use_si = false;
    }
    if o.no_pop {
        cfg.use_pop = false;
    }
    if !o.k.is_empty() {
        cfg.k = o.k.clone();
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = &o.out {
        cfg.out = v.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = resolve(&cli.overrides)?;
    match cli.command {
        Command::Ingest => commands::ingest(&mut cfg)?,
        Command::Fit => commands::fit(&cfg)?,
        Command::Evaluate { split, variant } => commands::evaluate(&cfg, split, variant.as_deref())?,
        Command::Recommend { users } => return commands::recommend(&cfg, &users),
        Command::Sweep { ranks, fractions, split } => commands::sweep(&cfg, &ranks, &fractions, split)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            let no_records = e.downcast_ref::<popsi::Error>().is_some_and(|e| matches!(e.root(), popsi::Error::NoRecords));
            ExitCode::from(if no_records { 2 } else { 1 })
        }
    }
}
