//! Episode simulation: run a policy against an instance for a fixed horizon
//! and record the pseudo-regret trajectory.
//!
//! Regret is pseudo-regret computed from the true means: the round-t
//! increment is the sub-optimality gap of the selected channel, so the final
//! value always equals `sum_i gap_i * T_i(n)` (the regret decomposition).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::instance::ProblemInstance;
use crate::policy::{PolicyKind, PolicyState};
use crate::rng::RngStream;
use crate::scalar::Real;

/// The maximin-optimal channel and per-channel sub-optimality gaps of an
/// instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProfile<R> {
    /// Maximin-optimal channel index (smallest index on ties).
    pub optimal: usize,
    /// The optimal value: the row minimum of the optimal channel.
    pub optimal_value: R,
    /// Per-channel gaps; `gaps[optimal] == 0` and every entry is >= 0.
    pub gaps: Vec<R>,
}

impl<R: Real> GapProfile<R> {
    /// Sum of all gaps.
    pub fn sum_gaps(&self) -> R {
        self.gaps.iter().copied().fold(R::zero(), |a, b| a + b)
    }

    /// Smallest nonzero gap, or `None` when every channel is optimal.
    pub fn min_positive_gap(&self) -> Option<R> {
        self.gaps
            .iter()
            .copied()
            .filter(|&g| g > R::zero())
            .fold(None, |acc, g| match acc {
                None => Some(g),
                Some(cur) => Some(cur.min(g)),
            })
    }
}

/// Compute the maximin-optimal channel and the gap vector of an instance.
///
/// The optimal channel maximizes the row minimum; ties go to the smallest
/// index, and gaps are `optimal_value - row_min(i)`.
pub fn gap_profile<R: Real>(instance: &ProblemInstance<R>) -> GapProfile<R> {
    let row_mins: Vec<R> = (0..instance.channels())
        .map(|i| instance.row_min(i).expect("channel index in range"))
        .collect();
    let mut optimal = 0;
    for (i, &v) in row_mins.iter().enumerate().skip(1) {
        if v > row_mins[optimal] {
            optimal = i;
        }
    }
    let optimal_value = row_mins[optimal];
    let gaps = row_mins.iter().map(|&v| optimal_value - v).collect();
    GapProfile {
        optimal,
        optimal_value,
        gaps,
    }
}

/// The record of one simulated episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace<R> {
    /// Number of rounds n.
    pub horizon: u64,
    /// Selected channel per round (0-based).
    pub actions: Vec<u32>,
    /// Cumulative pseudo-regret after each round; nondecreasing.
    pub regret_curve: Vec<R>,
    /// Pull count per channel at the horizon.
    pub final_counts: Vec<u64>,
}

impl<R: Real> SimulationTrace<R> {
    /// Cumulative regret after `round` (1-based).
    pub fn regret_at(&self, round: u64) -> R {
        assert!(round >= 1 && round <= self.horizon, "round out of range");
        self.regret_curve[(round - 1) as usize]
    }

    /// Final cumulative regret.
    pub fn final_regret(&self) -> R {
        *self.regret_curve.last().expect("horizon is positive")
    }

    /// The regret curve subsampled at the given rounds, for compact storage
    /// of long traces.
    pub fn checkpoint_curve(&self, checkpoints: &[u64]) -> Vec<R> {
        checkpoints.iter().map(|&c| self.regret_at(c)).collect()
    }

    /// Columnar CSV export with header `round,action,cumulative_regret`.
    /// Rounds are 1-based, actions are 0-based channel indices.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.regret_curve.len() * 16 + 32);
        out.push_str("round,action,cumulative_regret\n");
        for (idx, (&action, &regret)) in self.actions.iter().zip(&self.regret_curve).enumerate() {
            let _ = writeln!(out, "{},{},{}", idx as u64 + 1, action, regret);
        }
        out
    }
}

/// Run one episode: `horizon` rounds of select, sample, update.
///
/// The cumulative pseudo-regret after round t is the sum of the gaps of the
/// channels selected so far, evaluated on the true means. Index policies
/// require `horizon >= m` so the initialization phase completes.
pub fn run_episode<R: Real>(
    instance: &ProblemInstance<R>,
    kind: PolicyKind,
    horizon: u64,
    delta: R,
    rng: &mut RngStream,
) -> Result<SimulationTrace<R>, Error> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let m = instance.channels();
    if matches!(kind, PolicyKind::MaximinUcb | PolicyKind::GreedyMaximin) && horizon < m as u64 {
        return Err(Error::HorizonTooShort {
            horizon,
            channels: m,
        });
    }
    if let PolicyKind::Oracle(channel) = kind {
        if channel >= m {
            return Err(Error::ChannelOutOfRange {
                index: channel,
                channels: m,
            });
        }
    }

    let profile = gap_profile(instance);
    let mut state = PolicyState::new(m, instance.nodes(), delta, instance.sigma())?;
    let mut actions = Vec::with_capacity(horizon as usize);
    let mut regret_curve = Vec::with_capacity(horizon as usize);
    let mut rewards = Vec::with_capacity(instance.nodes());
    let mut cumulative = R::zero();

    for _ in 0..horizon {
        let channel = kind.select(&state, rng);
        instance.sample_rewards_into(channel, rng, &mut rewards)?;
        state.update_samples(channel, &rewards)?;
        cumulative += profile.gaps[channel];
        actions.push(channel as u32);
        regret_curve.push(cumulative);
    }

    Ok(SimulationTrace {
        horizon,
        actions,
        regret_curve,
        final_counts: state.counts().to_vec(),
    })
}
