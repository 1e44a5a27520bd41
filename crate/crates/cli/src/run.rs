//! Command implementations and the exit-code contract.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use maximin_bandit::{
    concentration_check, gap_profile, run_gap_sweep, run_scale_sweep, run_scenario_episode,
    theorem1_bound, theorem2_bound, ConfigError, ExperimentReport, InstanceGenerator, RewardFamily,
    RngStream, ScenarioFile, DEFAULT_CHANNEL_SWEEP, DEFAULT_GAP_SWEEP, DEFAULT_NODE_SWEEP,
};

use crate::plot::render_svg;
use crate::{Cli, Command, CommonArgs, OutputFormat};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] maximin_bandit::Error),
    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    /// 1 for IO and config parse failures, 2 for semantic validation
    /// failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(err) if err.is_parse_failure() => 1,
            CliError::Config(_) => 2,
            CliError::Core(_) => 2,
            CliError::Write { .. } => 1,
            CliError::Validation(_) => 2,
        }
    }
}

/// Dispatch a parsed invocation.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args.common),
        Command::GapSweep(args) => cmd_gap_sweep(&args.common, args.plot.as_deref(), args.workers),
        Command::ScaleSweep(args) => {
            cmd_scale_sweep(&args.common, args.plot.as_deref(), args.workers)
        }
        Command::Bounds(args) => cmd_bounds(&args.common),
        Command::Concentration(args) => cmd_concentration(&args.common),
    }
}

fn load(common: &CommonArgs) -> Result<ScenarioFile, CliError> {
    Ok(maximin_bandit::load_scenario(
        common.config.as_deref(),
        &common.overrides(),
    )?)
}

fn cmd_simulate(common: &CommonArgs) -> Result<(), CliError> {
    let file = load(common)?;
    let scenario = file.to_scenario()?;
    let trace = run_scenario_episode(&scenario, 0)?;
    let text = match common.format {
        OutputFormat::Csv => trace.to_csv(),
        OutputFormat::Json => to_json(&trace),
    };
    write_output(common.out.as_deref(), &text)
}

fn cmd_gap_sweep(common: &CommonArgs, plot: Option<&Path>, workers: usize) -> Result<(), CliError> {
    let file = load(common)?;
    let base = file.to_scenario()?;
    let gaps = file
        .sweep
        .gaps
        .clone()
        .unwrap_or_else(|| DEFAULT_GAP_SWEEP.to_vec());
    let report = run_gap_sweep(&gaps, &base, workers)?;
    emit_report(&report, common, plot)
}

fn cmd_scale_sweep(
    common: &CommonArgs,
    plot: Option<&Path>,
    workers: usize,
) -> Result<(), CliError> {
    let file = load(common)?;
    let base = file.to_scenario()?;
    let channels = file
        .sweep
        .channels
        .clone()
        .unwrap_or_else(|| DEFAULT_CHANNEL_SWEEP.to_vec());
    let nodes = file
        .sweep
        .nodes
        .clone()
        .unwrap_or_else(|| DEFAULT_NODE_SWEEP.to_vec());
    let report = run_scale_sweep(&channels, &nodes, &base, workers)?;
    emit_report(&report, common, plot)
}

#[derive(Debug, Serialize)]
struct BoundsReport {
    scenario: String,
    sigma: f64,
    checkpoints: Vec<u64>,
    bound_t1: Vec<f64>,
    bound_t2: Vec<f64>,
}

fn cmd_bounds(common: &CommonArgs) -> Result<(), CliError> {
    let file = load(common)?;
    let scenario = file.to_scenario()?;
    let instance = scenario.build_instance()?;
    let profile = gap_profile(&instance);
    let checkpoints = scenario.checkpoints_or_default();
    let label = match &scenario.generator {
        InstanceGenerator::AffineGrid { g, m, p } => format!("affine g={g} m={m} p={p}"),
        InstanceGenerator::Explicit { means } => format!(
            "explicit {}x{}",
            means.len(),
            means.first().map_or(0, Vec::len)
        ),
    };
    let bounds = BoundsReport {
        scenario: label,
        sigma: scenario.sigma,
        bound_t1: checkpoints
            .iter()
            .map(|&n| theorem1_bound(&profile, scenario.sigma, n))
            .collect(),
        bound_t2: checkpoints
            .iter()
            .map(|&n| theorem2_bound(&profile, scenario.sigma, n))
            .collect(),
        checkpoints,
    };
    let text = match common.format {
        OutputFormat::Csv => {
            let mut out = String::from("scenario,checkpoint,bound_t1,bound_t2\n");
            for (k, &checkpoint) in bounds.checkpoints.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    bounds.scenario, checkpoint, bounds.bound_t1[k], bounds.bound_t2[k]
                );
            }
            out
        }
        OutputFormat::Json => to_json(&bounds),
    };
    write_output(common.out.as_deref(), &text)
}

#[derive(Debug, Serialize)]
struct ConcentrationReport {
    family: RewardFamily,
    mean: f64,
    sigma: f64,
    samples: u64,
    epsilon: f64,
    trials: u64,
    exceedances: u64,
    observed_rate: f64,
    bound: f64,
}

fn cmd_concentration(common: &CommonArgs) -> Result<(), CliError> {
    let file = load(common)?;
    let section = &file.concentration;
    if section.samples == 0 {
        return Err(CliError::Validation(
            "concentration.samples must be at least 1".into(),
        ));
    }
    if section.trials == 0 {
        return Err(CliError::Validation(
            "concentration.trials must be at least 1".into(),
        ));
    }
    if section.epsilon.is_nan() || section.epsilon < 0.0 {
        return Err(CliError::Validation(
            "concentration.epsilon must be nonnegative".into(),
        ));
    }
    if !(section.sigma > 0.0 && section.sigma.is_finite()) {
        return Err(CliError::Validation(
            "concentration.sigma must be positive".into(),
        ));
    }
    if section.family == RewardFamily::Bernoulli && !(0.0..=1.0).contains(&section.mean) {
        return Err(CliError::Validation(
            "concentration.mean must lie in [0, 1] for the Bernoulli family".into(),
        ));
    }

    let mut rng = RngStream::new(file.seed, 0);
    let check = concentration_check(
        section.family,
        section.mean,
        section.sigma,
        section.samples,
        section.epsilon,
        section.trials,
        &mut rng,
    );
    let result = ConcentrationReport {
        family: section.family,
        mean: section.mean,
        sigma: section.sigma,
        samples: section.samples,
        epsilon: section.epsilon,
        trials: section.trials,
        exceedances: check.exceedances,
        observed_rate: check.observed_rate,
        bound: check.bound,
    };
    let text = match common.format {
        OutputFormat::Csv => {
            let mut out = String::from(
                "family,mean,sigma,samples,epsilon,trials,exceedances,observed_rate,bound\n",
            );
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                result.family,
                result.mean,
                result.sigma,
                result.samples,
                result.epsilon,
                result.trials,
                result.exceedances,
                result.observed_rate,
                result.bound
            );
            out
        }
        OutputFormat::Json => to_json(&result),
    };
    write_output(common.out.as_deref(), &text)
}

fn emit_report(
    report: &ExperimentReport<f64>,
    common: &CommonArgs,
    plot: Option<&Path>,
) -> Result<(), CliError> {
    let text = match common.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    write_output(common.out.as_deref(), &text)?;
    if let Some(path) = plot {
        let svg = render_svg(report, false);
        write_file(path, &svg)?;
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
