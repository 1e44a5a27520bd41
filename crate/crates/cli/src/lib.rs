//! Command-line front end for the maximin bandit harness.
//!
//! Subcommands: `simulate` (one episode, trace export), `gap-sweep` and
//! `scale-sweep` (the two bundled Monte Carlo experiments), `bounds`
//! (closed-form regret bound curves), and `concentration` (sub-Gaussian
//! tail check). Every command is deterministic given its config and seed;
//! exit codes are 0 on success, 1 on IO or config parse failures, and 2 on
//! semantic validation failures.

pub mod plot;
pub mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "maximin-bandit",
    version,
    about = "Maximin bandit simulator and experiment harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a single episode and write its regret trace.
    Simulate(SimulateArgs),
    /// Sweep the minimum sub-optimality gap and aggregate regret curves.
    GapSweep(SweepArgs),
    /// Sweep the channel and node counts and aggregate regret curves.
    ScaleSweep(SweepArgs),
    /// Evaluate the theoretical regret bound curves for a scenario.
    Bounds(BoundsArgs),
    /// Monte Carlo check of the sub-Gaussian concentration bound.
    Concentration(ConcentrationArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML); built-in defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the data document here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Data document format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,

    /// Shorthand for --set seed=N (takes precedence over --set).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Shorthand for --set horizon=N (takes precedence over --set).
    #[arg(long)]
    pub horizon: Option<u64>,

    /// Shorthand for --set replications=N (takes precedence over --set).
    #[arg(long)]
    pub reps: Option<u32>,

    /// Dotted-key scenario overrides, e.g. --set instance.g=0.03.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl CommonArgs {
    /// Overrides in application order: --set entries first, then the
    /// dedicated flags so they win.
    pub fn overrides(&self) -> Vec<String> {
        let mut sets = self.set.clone();
        if let Some(seed) = self.seed {
            sets.push(format!("seed={seed}"));
        }
        if let Some(horizon) = self.horizon {
            sets.push(format!("horizon={horizon}"));
        }
        if let Some(reps) = self.reps {
            sets.push(format!("replications={reps}"));
        }
        sets
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Also render the aggregated curves as a standalone SVG.
    #[arg(long, value_name = "PATH")]
    pub plot: Option<PathBuf>,

    /// Worker threads for replications; 0 uses all cores. Results are
    /// identical for every worker count.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ConcentrationArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}
