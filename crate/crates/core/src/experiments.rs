//! Instance generators and scenario runners for the two bundled regret
//! experiments: regret versus the minimum sub-optimality gap, and regret
//! versus the number of channels and nodes.
//!
//! Replications are embarrassingly parallel. Every replication owns a
//! preassigned random stream derived from (scenario index, replication
//! index), so reports are independent of the worker schedule: running with
//! one worker or many produces byte-identical output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{aggregate_runs, theorem1_bound, theorem2_bound};
use crate::error::Error;
use crate::instance::{ProblemInstance, RewardFamily};
use crate::policy::PolicyKind;
use crate::report::{ExperimentReport, ScenarioCurve};
use crate::rng::RngStream;
use crate::scalar::{from_f64, Real};
use crate::simulate::{gap_profile, run_episode, SimulationTrace};

/// Gap values swept by the bundled minimum-gap experiment.
pub const DEFAULT_GAP_SWEEP: [f64; 5] = [0.03, 0.04, 0.05, 0.06, 0.07];
/// Channel counts swept by the bundled scaling experiment.
pub const DEFAULT_CHANNEL_SWEEP: [usize; 3] = [4, 6, 8];
/// Node counts swept by the bundled scaling experiment.
pub const DEFAULT_NODE_SWEEP: [usize; 3] = [4, 6, 8];
/// Number of log-spaced checkpoints used when a scenario does not pin them.
pub const DEFAULT_CHECKPOINT_COUNT: usize = 50;

/// How a scenario's mean matrix is produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum InstanceGenerator {
    /// The affine grid `mu[i][j] = 0.5 - g (i - j)` (1-based i, j) on an
    /// `m x p` matrix. Its gap profile is `gap_i = g (i - 1)`, so the
    /// minimum positive gap equals `g`.
    AffineGrid { g: f64, m: usize, p: usize },
    /// An explicit mean matrix.
    Explicit { means: Vec<Vec<f64>> },
}

impl Default for InstanceGenerator {
    fn default() -> Self {
        InstanceGenerator::AffineGrid {
            g: 0.05,
            m: 6,
            p: 5,
        }
    }
}

/// Rule for deriving the confidence parameter from the horizon. The
/// guarantee analysis assumes `1/n^2`; the bundled experiments run with
/// `1/T`. Both are expressible because delta is resolved once per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaRule {
    /// delta = 1 / horizon
    InverseHorizon,
    /// delta = 1 / horizon^2
    InverseHorizonSquared,
    /// A fixed value in (0, 1).
    Fixed(f64),
}

impl DeltaRule {
    pub fn resolve(self, horizon: u64) -> f64 {
        match self {
            DeltaRule::InverseHorizon => 1.0 / horizon as f64,
            DeltaRule::InverseHorizonSquared => 1.0 / (horizon as f64 * horizon as f64),
            DeltaRule::Fixed(value) => value,
        }
    }
}

/// Which policy a scenario runs. `Oracle` resolves to the maximin-optimal
/// channel of the generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyChoice {
    #[default]
    MaximinUcb,
    UniformRandom,
    GreedyMaximin,
    Oracle,
}

impl PolicyChoice {
    pub fn resolve(self, optimal_channel: usize) -> PolicyKind {
        match self {
            PolicyChoice::MaximinUcb => PolicyKind::MaximinUcb,
            PolicyChoice::UniformRandom => PolicyKind::UniformRandom,
            PolicyChoice::GreedyMaximin => PolicyKind::GreedyMaximin,
            PolicyChoice::Oracle => PolicyKind::Oracle(optimal_channel),
        }
    }
}

/// A fully specified scenario: instance generator, run length, confidence
/// rule, reward model, and the Monte Carlo budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub generator: InstanceGenerator,
    pub horizon: u64,
    pub delta_rule: DeltaRule,
    pub sigma: f64,
    pub family: RewardFamily,
    pub policy: PolicyChoice,
    pub replications: u32,
    pub seed: u64,
    /// Explicit checkpoint rounds; `None` selects
    /// [`DEFAULT_CHECKPOINT_COUNT`] log-spaced rounds plus the final round.
    pub checkpoints: Option<Vec<u64>>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            generator: InstanceGenerator::default(),
            horizon: 50_000,
            delta_rule: DeltaRule::InverseHorizon,
            sigma: 1.0,
            family: RewardFamily::Bernoulli,
            policy: PolicyChoice::MaximinUcb,
            replications: 1_000,
            seed: 42,
            checkpoints: None,
        }
    }
}

impl ScenarioConfig {
    pub fn build_instance(&self) -> Result<ProblemInstance<f64>, Error> {
        match &self.generator {
            InstanceGenerator::AffineGrid { g, m, p } => {
                affine_instance(*g, *m, *p, self.sigma, self.family)
            }
            InstanceGenerator::Explicit { means } => {
                ProblemInstance::new(means.clone(), self.sigma, self.family)
            }
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta_rule.resolve(self.horizon)
    }

    pub fn checkpoints_or_default(&self) -> Vec<u64> {
        match &self.checkpoints {
            Some(list) => list.clone(),
            None => log_checkpoints(self.horizon, DEFAULT_CHECKPOINT_COUNT),
        }
    }
}

/// Generate the affine-grid instance `mu[i][j] = 0.5 - g (i - j)`.
pub fn affine_instance<R: Real>(
    g: f64,
    m: usize,
    p: usize,
    sigma: f64,
    family: RewardFamily,
) -> Result<ProblemInstance<R>, Error> {
    let g_r = from_f64::<R>(g);
    let half = from_f64::<R>(0.5);
    let rows = (0..m)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let diff = R::from_i64(i as i64 - j as i64).expect("small index difference");
                    half - g_r * diff
                })
                .collect()
        })
        .collect();
    ProblemInstance::new(rows, from_f64(sigma), family)
}

/// `count` log-spaced rounds in [1, horizon], deduplicated, always ending at
/// the horizon.
pub fn log_checkpoints(horizon: u64, count: usize) -> Vec<u64> {
    assert!(horizon >= 1);
    let mut rounds = Vec::with_capacity(count + 1);
    if count > 1 {
        let log_h = (horizon as f64).ln();
        for k in 0..count {
            let t = (log_h * k as f64 / (count - 1) as f64).exp().round() as u64;
            rounds.push(t.clamp(1, horizon));
        }
    }
    rounds.push(horizon);
    rounds.sort_unstable();
    rounds.dedup();
    rounds
}

/// Stream id owned by one replication of one scenario.
fn replication_stream(scenario_index: u32, replication: u32) -> u64 {
    (u64::from(scenario_index) << 32) | u64::from(replication)
}

/// Run one scenario's replications in parallel, in replication order.
pub fn run_replications(
    config: &ScenarioConfig,
    scenario_index: u32,
) -> Result<Vec<SimulationTrace<f64>>, Error> {
    if config.replications == 0 {
        return Err(Error::InvalidScenario(
            "replications must be at least 1".into(),
        ));
    }
    let instance = config.build_instance()?;
    let delta = config.delta();
    let policy = config.policy.resolve(gap_profile(&instance).optimal);
    (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngStream::new(config.seed, replication_stream(scenario_index, rep));
            run_episode(&instance, policy, config.horizon, delta, &mut rng)
        })
        .collect()
}

/// Run one episode of a scenario on the given stream id (used by the
/// single-trace CLI path).
pub fn run_scenario_episode(
    config: &ScenarioConfig,
    stream: u64,
) -> Result<SimulationTrace<f64>, Error> {
    let instance = config.build_instance()?;
    let delta = config.delta();
    let policy = config.policy.resolve(gap_profile(&instance).optimal);
    let mut rng = RngStream::new(config.seed, stream);
    run_episode(&instance, policy, config.horizon, delta, &mut rng)
}

/// Sweep the affine coefficient: one scenario per minimum gap, aggregated at
/// the base scenario's checkpoints.
pub fn run_gap_sweep(
    gaps: &[f64],
    base: &ScenarioConfig,
    workers: usize,
) -> Result<ExperimentReport<f64>, Error> {
    let (m, p) = match base.generator {
        InstanceGenerator::AffineGrid { m, p, .. } => (m, p),
        InstanceGenerator::Explicit { .. } => {
            return Err(Error::InvalidScenario(
                "gap sweep requires the affine-grid generator".into(),
            ))
        }
    };
    if gaps.is_empty() {
        return Err(Error::InvalidScenario(
            "gap sweep needs at least one gap".into(),
        ));
    }
    let scenarios: Vec<(String, ScenarioConfig)> = gaps
        .iter()
        .map(|&g| {
            let mut cfg = base.clone();
            cfg.generator = InstanceGenerator::AffineGrid { g, m, p };
            (format!("gap={g}"), cfg)
        })
        .collect();
    run_sweep(&scenarios, base, workers)
}

/// Sweep the grid shape: one scenario per (channels, nodes) pair, channels
/// outermost.
pub fn run_scale_sweep(
    channel_counts: &[usize],
    node_counts: &[usize],
    base: &ScenarioConfig,
    workers: usize,
) -> Result<ExperimentReport<f64>, Error> {
    let g = match base.generator {
        InstanceGenerator::AffineGrid { g, .. } => g,
        InstanceGenerator::Explicit { .. } => {
            return Err(Error::InvalidScenario(
                "scale sweep requires the affine-grid generator".into(),
            ))
        }
    };
    if channel_counts.is_empty() || node_counts.is_empty() {
        return Err(Error::InvalidScenario(
            "scale sweep needs at least one channel and node count".into(),
        ));
    }
    let mut scenarios = Vec::with_capacity(channel_counts.len() * node_counts.len());
    for &m in channel_counts {
        for &p in node_counts {
            let mut cfg = base.clone();
            cfg.generator = InstanceGenerator::AffineGrid { g, m, p };
            scenarios.push((format!("m={m} p={p}"), cfg));
        }
    }
    run_sweep(&scenarios, base, workers)
}

fn run_sweep(
    scenarios: &[(String, ScenarioConfig)],
    base: &ScenarioConfig,
    workers: usize,
) -> Result<ExperimentReport<f64>, Error> {
    let checkpoints = base.checkpoints_or_default();
    with_worker_pool(workers, || {
        let mut curves = Vec::with_capacity(scenarios.len());
        for (index, (label, config)) in scenarios.iter().enumerate() {
            let traces = run_replications(config, index as u32)?;
            let aggregate = aggregate_runs(&traces, &checkpoints)?;
            let profile = gap_profile(&config.build_instance()?);
            let bound_t1 = checkpoints
                .iter()
                .map(|&n| theorem1_bound(&profile, config.sigma, n))
                .collect();
            let bound_t2 = checkpoints
                .iter()
                .map(|&n| theorem2_bound(&profile, config.sigma, n))
                .collect();
            curves.push(ScenarioCurve {
                label: label.clone(),
                mean_regret: aggregate.mean_regret,
                ci_halfwidth: aggregate.ci_halfwidth,
                bound_t1,
                bound_t2,
            });
        }
        Ok(ExperimentReport {
            checkpoints,
            replications: base.replications,
            scenarios: curves,
        })
    })
}

/// Run `body` under a rayon pool capped at `workers` threads; 0 keeps the
/// ambient pool. Results never depend on the pool size.
pub fn with_worker_pool<T>(workers: usize, body: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    if workers == 0 {
        body()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool builds")
            .install(body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_base() -> ScenarioConfig {
        ScenarioConfig {
            horizon: 400,
            replications: 4,
            seed: 7,
            checkpoints: Some(vec![100, 400]),
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn affine_grid_matches_the_published_instance() {
        let inst = affine_instance::<f64>(0.05, 6, 5, 1.0, RewardFamily::Bernoulli).unwrap();
        assert_eq!(inst.channels(), 6);
        assert_eq!(inst.nodes(), 5);
        // mu[0][4] is the largest entry, mu[5][0] the smallest.
        assert!((inst.mean(0, 4) - 0.70).abs() < 1e-12);
        assert!((inst.mean(5, 0) - 0.25).abs() < 1e-12);
        let profile = gap_profile(&inst);
        assert!((profile.min_positive_gap().unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn affine_grid_with_zero_coefficient_is_flat() {
        let inst = affine_instance::<f64>(0.0, 4, 3, 1.0, RewardFamily::Bernoulli).unwrap();
        let profile = gap_profile(&inst);
        assert_eq!(profile.optimal, 0);
        assert!(profile.gaps.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn affine_gap_profile_is_g_times_index() {
        for &(g, m, p) in &[(0.03f64, 6usize, 5usize), (0.05, 8, 8), (0.07, 4, 6)] {
            let inst = affine_instance::<f64>(g, m, p, 1.0, RewardFamily::Bernoulli).unwrap();
            let profile = gap_profile(&inst);
            assert_eq!(profile.optimal, 0);
            for (i, &gap) in profile.gaps.iter().enumerate() {
                assert!(
                    (gap - g * i as f64).abs() < 1e-12,
                    "g={g} m={m} p={p} i={i}"
                );
            }
        }
    }

    #[test]
    fn affine_grid_rejects_out_of_range_bernoulli_means() {
        let err = affine_instance::<f64>(0.2, 6, 5, 1.0, RewardFamily::Bernoulli).unwrap_err();
        assert!(matches!(err, Error::MeanOutOfRange { .. }));
    }

    #[test]
    fn log_checkpoints_are_sorted_unique_and_end_at_the_horizon() {
        for horizon in [1u64, 2, 10, 1_000, 50_000] {
            let pts = log_checkpoints(horizon, DEFAULT_CHECKPOINT_COUNT);
            assert_eq!(*pts.last().unwrap(), horizon);
            assert!(pts[0] >= 1);
            assert!(pts.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(log_checkpoints(1, 50), vec![1]);
    }

    #[test]
    fn delta_rules_resolve_as_documented() {
        assert_eq!(DeltaRule::InverseHorizon.resolve(50_000), 1.0 / 50_000.0);
        assert_eq!(DeltaRule::InverseHorizonSquared.resolve(1_000), 1e-6);
        assert_eq!(DeltaRule::Fixed(0.25).resolve(9), 0.25);
    }

    #[test]
    fn single_gap_sweep_is_deterministic() {
        let base = small_base();
        let a = run_gap_sweep(&[0.05], &base, 1).unwrap();
        let b = run_gap_sweep(&[0.05], &base, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.scenarios.len(), 1);
        assert_eq!(a.scenarios[0].label, "gap=0.05");
        assert_eq!(a.checkpoints, vec![100, 400]);
    }

    #[test]
    fn reports_do_not_depend_on_the_worker_count() {
        let base = small_base();
        let serial = run_gap_sweep(&[0.03, 0.07], &base, 1).unwrap();
        let parallel = run_gap_sweep(&[0.03, 0.07], &base, 4).unwrap();
        assert_eq!(serial, parallel);

        let serial = run_scale_sweep(&[3, 4], &[2], &base, 1).unwrap();
        let parallel = run_scale_sweep(&[3, 4], &[2], &base, 3).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn scale_sweep_produces_one_scenario_per_pair() {
        let base = small_base();
        let report = run_scale_sweep(&[4], &[4], &base, 1).unwrap();
        assert_eq!(report.scenarios.len(), 1);
        assert_eq!(report.scenarios[0].label, "m=4 p=4");

        let report = run_scale_sweep(&[4, 6], &[2, 3], &base, 1).unwrap();
        let labels: Vec<&str> = report.scenarios.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(labels, ["m=4 p=2", "m=4 p=3", "m=6 p=2", "m=6 p=3"]);
    }

    #[test]
    fn bound_curves_do_not_depend_on_the_node_count() {
        let base = small_base();
        let report = run_scale_sweep(&[5], &[2, 6], &base, 1).unwrap();
        assert_eq!(report.scenarios[0].bound_t1, report.scenarios[1].bound_t1);
        assert_eq!(report.scenarios[0].bound_t2, report.scenarios[1].bound_t2);
    }

    #[test]
    fn sweeps_reject_explicit_generators() {
        let mut base = small_base();
        base.generator = InstanceGenerator::Explicit {
            means: vec![vec![0.5]],
        };
        assert!(run_gap_sweep(&[0.05], &base, 1).is_err());
        assert!(run_scale_sweep(&[2], &[2], &base, 1).is_err());
    }

    #[test]
    fn mean_regret_rows_are_nondecreasing() {
        let base = small_base();
        let report = run_gap_sweep(&[0.04, 0.06], &base, 0).unwrap();
        for scenario in &report.scenarios {
            for w in scenario.mean_regret.windows(2) {
                assert!(w[1] >= w[0]);
            }
            assert!(scenario.ci_halfwidth.iter().all(|&h| h >= 0.0));
        }
    }
}
