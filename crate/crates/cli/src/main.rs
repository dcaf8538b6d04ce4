//! Batch front door: parses JSON run configs, dispatches to the analysis
//! library, and writes JSON/CSV reports. No interactive loop; the intended
//! use is parameter sweeps driven by config files.
//!
//! Exit codes: 0 ok, 1 config error, 2 budget exhausted, 3 covering-lemma
//! precondition failed, 4 no recurrent anchor.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use norbit::Error;

#[derive(Parser)]
#[command(name = "norbit", version, about = "Orbit analysis for nonexpansive maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config's outputs.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker pool size; defaults to the number of processors.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Horizon override.
    #[arg(long)]
    horizon: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify orbits and detect recurrence for each configured start.
    Analyze(CommonArgs),
    /// Run the covering-lemma checks on an orbit or a CSV distance table.
    Calka(CommonArgs),
    /// Hyperbolic distances and chain-search upper bounds for point pairs.
    Kobayashi(CommonArgs),
    /// Estimate the limit retraction and audit the group of iterate limits.
    Retract(CommonArgs),
    /// Decide whether a finite composition table is a group.
    Semigroup(CommonArgs),
}

/// Maps library errors onto the documented exit-code ledger.
pub(crate) fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded(_) => 2,
        Error::NotInjective { .. } | Error::WrongMonotonicity(_) => 3,
        Error::NoRecurrentAnchor => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(args) => {
            let jobs = effective_jobs(args);
            load_run_config(args).and_then(|(mut cfg, bytes)| {
                apply_overrides(&mut cfg, args);
                commands::analyze::run(&cfg, &bytes, jobs)
            })
        }
        Command::Retract(args) => load_run_config(args).and_then(|(mut cfg, bytes)| {
            apply_overrides(&mut cfg, args);
            commands::retract::run(&cfg, &bytes)
        }),
        Command::Calka(args) => {
            config::load::<config::CalkaConfig>(&args.config)
                .map_err(|m| (1, m))
                .and_then(|(mut cfg, bytes)| {
                    if let Some(out) = &args.out {
                        cfg.outputs.dir = Some(out.clone());
                    }
                    if let Some(seed) = args.seed {
                        cfg.seed = seed;
                    }
                    if let Some(horizon) = args.horizon {
                        if let config::CalkaSource::Orbit { horizon: h, .. } = &mut cfg.source {
                            *h = horizon;
                        }
                    }
                    commands::calka::run(&cfg, &bytes)
                })
        }
        Command::Kobayashi(args) => {
            config::load::<config::KobayashiConfig>(&args.config)
                .map_err(|m| (1, m))
                .and_then(|(mut cfg, bytes)| {
                    if let Some(out) = &args.out {
                        cfg.outputs.dir = Some(out.clone());
                    }
                    commands::kobayashi::run(&cfg, &bytes)
                })
        }
        Command::Semigroup(args) => {
            config::load::<config::SemigroupConfig>(&args.config)
                .map_err(|m| (1, m))
                .and_then(|(mut cfg, bytes)| {
                    if let Some(out) = &args.out {
                        cfg.outputs.dir = Some(out.clone());
                    }
                    commands::semigroup::run(&cfg, &bytes)
                })
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}

fn effective_jobs(args: &CommonArgs) -> usize {
    args.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    })
}

fn load_run_config(args: &CommonArgs) -> Result<(config::RunConfig, Vec<u8>), (i32, String)> {
    config::load::<config::RunConfig>(&args.config).map_err(|m| (1, m))
}

fn apply_overrides(cfg: &mut config::RunConfig, args: &CommonArgs) {
    if let Some(out) = &args.out {
        cfg.outputs.dir = Some(out.clone());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(horizon) = args.horizon {
        cfg.horizon = horizon;
    }
}
