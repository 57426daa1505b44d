//! Command-line front end for the market simulation engine.
//!
//! Settings resolve in precedence order: built-in defaults, then the
//! `--config` file, then `--preset`, then individual flags. The output
//! directory additionally honors the `MMTSIM_OUT` environment variable
//! (between config file and `--out`).

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, DynamicKind, Format, Preset, StartKind};

/// Environment variable overriding the configured output directory.
const OUT_ENV: &str = "MMTSIM_OUT";

#[derive(Parser)]
#[command(
    name = "mmtsim",
    version,
    about = "Two-player market impact game: simulation, feasibility maps, learning dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct CommonArgs {
    /// TOML config file; flags override its values.
    #[arg(long, value_name = "PATH", global = false)]
    config: Option<PathBuf>,

    /// Master seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Trial count (episodes, learner runs, or oracle episodes per point).
    #[arg(long, value_name = "N")]
    trials: Option<u64>,

    /// Round count (episode length, learning steps, or oracle horizon).
    #[arg(long, value_name = "N")]
    rounds: Option<u64>,

    /// Buy probability.
    #[arg(long, value_name = "X")]
    phi: Option<f64>,

    /// Named parameter bundle applied after the config file.
    #[arg(long, value_name = "NAME", value_enum)]
    preset: Option<Preset>,

    /// Output directory for artifacts.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Encoding of summary records and reports.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Update rule.
    #[arg(long, value_enum)]
    dynamic: Option<DynamicKind>,

    /// Smallest block step.
    #[arg(long, value_name = "X")]
    delta_min: Option<f64>,

    /// Largest block step.
    #[arg(long, value_name = "X")]
    delta_max: Option<f64>,

    /// Uniform gradient rate.
    #[arg(long, value_name = "X")]
    eta: Option<f64>,

    /// Learner initialization.
    #[arg(long, value_enum)]
    start: Option<StartKind>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Starting buy product x0.
    #[arg(long, value_name = "X")]
    x0: Option<f64>,

    /// Starting sell product y0.
    #[arg(long, value_name = "X")]
    y0: Option<f64>,

    /// Smallest block step.
    #[arg(long, value_name = "X")]
    delta_min: Option<f64>,

    /// Largest block step.
    #[arg(long, value_name = "X")]
    delta_max: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Module to check: market, strategy, feasibility, collusion, games,
    /// learning, sim, or all.
    #[arg(default_value = "all")]
    module: String,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo simulation and write round, panel, and summary
    /// tables.
    Simulate(CommonArgs),
    /// Run learner episodes and write trajectory and stopping-time tables.
    Learn(LearnArgs),
    /// Map analytic feasibility against the brute-force oracle on a grid.
    FeasibilityMap(CommonArgs),
    /// Print and write the stopping-time bound table for a start point.
    Bounds(BoundsArgs),
    /// Run the property suites and exit nonzero on any failure.
    Verify(VerifyArgs),
}

/// Defaults, then config file, then preset, then environment, then flags.
fn resolve(common: &CommonArgs) -> anyhow::Result<Config> {
    let mut config = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(preset) = common.preset {
        config.apply_preset(preset);
    }
    if let Ok(dir) = std::env::var(OUT_ENV) {
        if !dir.is_empty() {
            config.output.dir = PathBuf::from(dir);
        }
    }
    if let Some(seed) = common.seed {
        config.sim.seed = seed;
    }
    if let Some(trials) = common.trials {
        config.sim.trials = trials;
        config.feasibility.trials = trials;
    }
    if let Some(rounds) = common.rounds {
        config.sim.rounds = rounds;
        config.feasibility.rounds = rounds;
        config.learning.max_steps = rounds;
    }
    if let Some(phi) = common.phi {
        config.strategy.phi = phi;
    }
    if let Some(out) = &common.out {
        config.output.dir = out.clone();
    }
    if let Some(format) = common.format {
        config.output.format = format;
    }
    Ok(config)
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Simulate(common) => commands::simulate(&resolve(common)?),
        Command::Learn(args) => {
            let mut config = resolve(&args.common)?;
            if let Some(dynamic) = args.dynamic {
                config.learning.dynamic = dynamic;
            }
            if let Some(delta_min) = args.delta_min {
                config.learning.delta_min = delta_min;
                if args.delta_max.is_none() && config.learning.delta_max < delta_min {
                    config.learning.delta_max = delta_min;
                }
            }
            if let Some(delta_max) = args.delta_max {
                config.learning.delta_max = delta_max;
            }
            if let Some(eta) = args.eta {
                config.learning.eta = eta;
            }
            if let Some(start) = args.start {
                config.learning.start = start;
            }
            commands::learn(&config)
        }
        Command::FeasibilityMap(common) => commands::feasibility_map(&resolve(common)?),
        Command::Bounds(args) => {
            let mut config = resolve(&args.common)?;
            if let Some(x0) = args.x0 {
                config.bounds.x0 = x0;
            }
            if let Some(y0) = args.y0 {
                config.bounds.y0 = y0;
            }
            if let Some(delta_min) = args.delta_min {
                config.learning.delta_min = delta_min;
                if args.delta_max.is_none() && config.learning.delta_max < delta_min {
                    config.learning.delta_max = delta_min;
                }
            }
            if let Some(delta_max) = args.delta_max {
                config.learning.delta_max = delta_max;
            }
            commands::bounds(&config)
        }
        Command::Verify(args) => {
            let config = resolve(&args.common)?;
            commands::verify(&config, &args.module)
        }
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
