//! Maximin multi-armed bandits with vector-valued rewards.
//!
//! A learner repeatedly selects one of `m` channels; every selection returns
//! one reward per node from a `p`-node network, and the target is the
//! channel whose minimum mean reward across nodes is largest. This crate
//! provides:
//!
//! - [`instance`]: validated mean-matrix instances and deterministic reward
//!   sampling for Bernoulli, Gaussian, and truncated-Gaussian models;
//! - [`policy`]: the maximin UCB index policy plus uniform, oracle, and
//!   greedy baselines over incremental statistics;
//! - [`simulate`]: fixed-horizon episodes recording cumulative pseudo-regret;
//! - [`analysis`]: closed-form regret bounds, Monte Carlo aggregation with
//!   confidence intervals, and a sub-Gaussian concentration checker;
//! - [`experiments`]: the affine-grid instance family and the two bundled
//!   sweep experiments (regret versus minimum gap, regret versus grid shape);
//! - [`config`]: the TOML scenario schema shared with the CLI.
//!
//! Everything is deterministic given a seed: random draws come from
//! stream-addressed ChaCha8 generators ([`rng::RngStream`]) and replications
//! own preassigned streams, so results do not depend on thread scheduling.
//!
//! The numeric code is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the aliases below fix the common `f64` choice.
//!
//! ```
//! use maximin_bandit::{affine_instance, gap_profile, run_episode};
//! use maximin_bandit::{PolicyKind, RewardFamily, RngStream};
//!
//! let instance = affine_instance::<f64>(0.05, 6, 5, 1.0, RewardFamily::Bernoulli).unwrap();
//! let mut rng = RngStream::new(42, 0);
//! let trace = run_episode(&instance, PolicyKind::MaximinUcb, 1_000, 1e-6, &mut rng).unwrap();
//! let profile = gap_profile(&instance);
//! assert_eq!(profile.optimal, 0);
//! assert!(trace.final_regret() < 1_000.0 * 0.25);
//! ```

pub mod analysis;
pub mod config;
pub mod error;
pub mod experiments;
pub mod instance;
pub mod policy;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod simulate;

pub use analysis::{
    aggregate_runs, aggregate_runs_with_confidence, concentration_check, theorem1_bound,
    theorem2_bound, AggregatedRegret, ConcentrationCheck, DEFAULT_CONFIDENCE_Z,
};
pub use config::{load_scenario, ConfigError, ScenarioFile};
pub use error::Error;
pub use experiments::{
    affine_instance, log_checkpoints, run_gap_sweep, run_replications, run_scale_sweep,
    run_scenario_episode, with_worker_pool, DeltaRule, InstanceGenerator, PolicyChoice,
    ScenarioConfig, DEFAULT_CHANNEL_SWEEP, DEFAULT_GAP_SWEEP, DEFAULT_NODE_SWEEP,
};
pub use instance::{ProblemInstance, RewardFamily};
pub use policy::{Observation, PolicyKind, PolicyState};
pub use report::{ExperimentReport, ReportCsvError, ScenarioCurve};
pub use rng::RngStream;
pub use scalar::Real;
pub use simulate::{gap_profile, run_episode, GapProfile, SimulationTrace};

/// `f64` instantiations of the generic core types.
pub type ProblemInstance64 = ProblemInstance<f64>;
pub type PolicyState64 = PolicyState<f64>;
pub type Observation64 = Observation<f64>;
pub type GapProfile64 = GapProfile<f64>;
pub type SimulationTrace64 = SimulationTrace<f64>;
pub type ExperimentReport64 = ExperimentReport<f64>;

/// `f32` instantiations for memory-constrained sweeps.
pub type ProblemInstance32 = ProblemInstance<f32>;
pub type PolicyState32 = PolicyState<f32>;
pub type Observation32 = Observation<f32>;
pub type GapProfile32 = GapProfile<f32>;
pub type SimulationTrace32 = SimulationTrace<f32>;
pub type ExperimentReport32 = ExperimentReport<f32>;
