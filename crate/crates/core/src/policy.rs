//! Channel-selection policies over incremental sufficient statistics.
//!
//! The maximin UCB index for a channel is the minimum empirical mean across
//! nodes plus an exploration bonus:
//!
//! ```text
//! index_i = min_j emp_mean[i][j] + sqrt(2 sigma^2 ln(1/delta) / T_i)
//! ```
//!
//! Channels with no observations are never scored; selection falls back to
//! the round-robin initialization phase until every channel has been pulled
//! once.

use rand::Rng;

use crate::error::Error;
use crate::rng::RngStream;
use crate::scalar::{from_u64, Real};

/// One round of feedback: the selected channel and one reward per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<R> {
    /// Round number t, starting at 1.
    pub round: u64,
    /// Selected channel index (0-based).
    pub channel: usize,
    /// One reward per node, in node order.
    pub rewards: Vec<R>,
}

/// Which selection rule to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    /// Maximin UCB: argmax of the row-min empirical mean plus bonus.
    MaximinUcb,
    /// Uniform draw over channels each round (baseline).
    UniformRandom,
    /// Always plays the given channel (baseline; pass the maximin-optimal
    /// index for a zero-regret reference).
    Oracle(usize),
    /// Bonus-free variant of maximin UCB: argmax of the row-min empirical
    /// mean alone (baseline, demonstrates the value of exploration).
    GreedyMaximin,
}

/// Sufficient statistics for index policies: pull counts and per-pair
/// empirical means. Single-owner mutable state; one episode owns one state.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState<R> {
    counts: Vec<u64>,
    emp_means: Vec<R>, // row-major m x p; row i is meaningful iff counts[i] > 0
    round: u64,
    delta: R,
    sigma: R,
    nodes: usize,
    // 2 sigma^2 ln(1/delta), fixed for the lifetime of the state.
    bonus_numerator: R,
}

impl<R: Real> PolicyState<R> {
    /// Fresh state for `m` channels and `p` nodes.
    ///
    /// `delta` must lie in (0, 1) and `sigma` must be positive; `m` and `p`
    /// must be at least 1.
    pub fn new(m: usize, p: usize, delta: R, sigma: R) -> Result<Self, Error> {
        assert!(
            m >= 1 && p >= 1,
            "state needs at least one channel and node"
        );
        let delta_f = delta.to_f64().unwrap_or(f64::NAN);
        if !delta_f.is_finite() || delta_f <= 0.0 || delta_f >= 1.0 {
            return Err(Error::InvalidDelta(delta_f));
        }
        let sigma_f = sigma.to_f64().unwrap_or(f64::NAN);
        if !sigma_f.is_finite() || sigma_f <= 0.0 {
            return Err(Error::InvalidSigma(sigma_f));
        }
        Ok(Self {
            counts: vec![0; m],
            emp_means: vec![R::zero(); m * p],
            round: 0,
            delta,
            sigma,
            nodes: p,
            bonus_numerator: bonus_numerator(sigma, delta),
        })
    }

    pub fn channels(&self) -> usize {
        self.counts.len()
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Completed rounds; always equals the sum of the pull counts.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn delta(&self) -> R {
        self.delta
    }

    pub fn sigma(&self) -> R {
        self.sigma
    }

    /// Empirical mean for a pair, or `None` while the channel is unobserved.
    pub fn emp_mean(&self, channel: usize, node: usize) -> Option<R> {
        assert!(channel < self.channels() && node < self.nodes);
        (self.counts[channel] > 0).then(|| self.emp_means[channel * self.nodes + node])
    }

    /// Minimum empirical mean across nodes for one channel.
    pub fn min_emp_mean(&self, channel: usize) -> Result<R, Error> {
        if channel >= self.channels() {
            return Err(Error::ChannelOutOfRange {
                index: channel,
                channels: self.channels(),
            });
        }
        if self.counts[channel] == 0 {
            return Err(Error::UnobservedChannel(channel));
        }
        let row = &self.emp_means[channel * self.nodes..(channel + 1) * self.nodes];
        Ok(row.iter().copied().fold(row[0], R::min))
    }

    /// The maximin UCB index for one observed channel.
    ///
    /// Fails with [`Error::UnobservedChannel`] while `T_i = 0`; callers must
    /// drive the initialization phase instead of scoring such channels.
    pub fn ucb_index(&self, channel: usize) -> Result<R, Error> {
        let min_mean = self.min_emp_mean(channel)?;
        let t = from_u64::<R>(self.counts[channel]);
        Ok(min_mean + (self.bonus_numerator / t).sqrt())
    }

    /// Fold one observation into the statistics with the exact incremental
    /// mean rule. Rows of other channels are untouched.
    pub fn update(&mut self, obs: &Observation<R>) -> Result<(), Error> {
        self.update_samples(obs.channel, &obs.rewards)
    }

    /// Allocation-free update path used by the simulation loop.
    pub fn update_samples(&mut self, channel: usize, rewards: &[R]) -> Result<(), Error> {
        if channel >= self.channels() {
            return Err(Error::ChannelOutOfRange {
                index: channel,
                channels: self.channels(),
            });
        }
        if rewards.len() != self.nodes {
            return Err(Error::RewardLengthMismatch {
                got: rewards.len(),
                expected: self.nodes,
            });
        }
        self.counts[channel] += 1;
        self.round += 1;
        let t = from_u64::<R>(self.counts[channel]);
        let row = &mut self.emp_means[channel * self.nodes..(channel + 1) * self.nodes];
        for (slot, &x) in row.iter_mut().zip(rewards) {
            *slot = *slot + (x - *slot) / t;
        }
        Ok(())
    }
}

/// 2 sigma^2 ln(1/delta).
fn bonus_numerator<R: Real>(sigma: R, delta: R) -> R {
    let two = R::one() + R::one();
    two * sigma * sigma * (R::one() / delta).ln()
}

impl PolicyKind {
    /// Pick the next channel.
    ///
    /// Index policies (maximin UCB and greedy) first play every untried
    /// channel once, lowest index first; with a fresh state this is the
    /// round-robin initialization over the first `m` rounds. Afterwards they
    /// return the argmax of their score, ties broken toward the smallest
    /// channel index.
    pub fn select<R: Real>(self, state: &PolicyState<R>, rng: &mut RngStream) -> usize {
        match self {
            PolicyKind::MaximinUcb => untried_or_argmax(state, |s, i| {
                s.ucb_index(i).expect("channel observed after init phase")
            }),
            PolicyKind::GreedyMaximin => untried_or_argmax(state, |s, i| {
                s.min_emp_mean(i)
                    .expect("channel observed after init phase")
            }),
            PolicyKind::UniformRandom => rng.random_range(0..state.channels()),
            PolicyKind::Oracle(channel) => channel,
        }
    }
}

fn untried_or_argmax<R: Real>(
    state: &PolicyState<R>,
    score: impl Fn(&PolicyState<R>, usize) -> R,
) -> usize {
    if let Some(untried) = state.counts().iter().position(|&c| c == 0) {
        return untried;
    }
    let mut best = 0;
    let mut best_score = score(state, 0);
    for i in 1..state.channels() {
        let s = score(state, i);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state(m: usize, p: usize, delta: f64) -> PolicyState<f64> {
        PolicyState::new(m, p, delta, 1.0).unwrap()
    }

    /// Build a state with prescribed statistics, bypassing validation.
    /// Lets tests pin empirical means exactly (including delta = 1, which
    /// zeroes the bonus and is outside the constructor's domain).
    fn raw_state(
        counts: Vec<u64>,
        rows: Vec<Vec<f64>>,
        delta: f64,
        sigma: f64,
    ) -> PolicyState<f64> {
        let nodes = rows[0].len();
        let round = counts.iter().sum();
        PolicyState {
            counts,
            emp_means: rows.into_iter().flatten().collect(),
            round,
            delta,
            sigma,
            nodes,
            bonus_numerator: bonus_numerator(sigma, delta),
        }
    }

    fn kahan_mean(values: &[f64]) -> f64 {
        let mut sum = 0.0;
        let mut c = 0.0;
        for &v in values {
            let y = v - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        sum / values.len() as f64
    }

    #[test]
    fn fresh_state_is_empty() {
        let s = state(3, 2, 0.01);
        assert_eq!(s.counts(), &[0, 0, 0]);
        assert_eq!(s.round(), 0);
        assert_eq!(s.emp_mean(0, 0), None);
    }

    #[test]
    fn degenerate_one_by_one_state_is_valid() {
        let s = state(1, 1, 0.5);
        assert_eq!(s.channels(), 1);
        assert_eq!(s.nodes(), 1);
    }

    #[test]
    fn delta_outside_open_unit_interval_is_rejected() {
        for bad in [1.5, 1.0, 0.0, -0.2] {
            assert!(matches!(
                PolicyState::<f64>::new(2, 2, bad, 1.0).unwrap_err(),
                Error::InvalidDelta(_)
            ));
        }
        assert!(matches!(
            PolicyState::<f64>::new(2, 2, 0.1, 0.0).unwrap_err(),
            Error::InvalidSigma(_)
        ));
    }

    #[test]
    fn ucb_index_with_delta_one_has_no_bonus() {
        let s = raw_state(vec![4], vec![vec![0.6, 0.4]], 1.0, 1.0);
        assert_eq!(s.ucb_index(0).unwrap(), 0.4);
    }

    #[test]
    fn ucb_index_matches_hand_evaluation() {
        // sigma = 1, delta = e^-2, T = 4, row (0.6, 0.4):
        // bonus = sqrt(2 * 1 * 2 / 4) = 1, index = 0.4 + 1 = 1.4.
        let mut s = state(1, 2, (-2.0f64).exp());
        for _ in 0..4 {
            s.update_samples(0, &[0.6, 0.4]).unwrap();
        }
        assert!((s.ucb_index(0).unwrap() - 1.4).abs() < 1e-9);
    }

    #[test]
    fn bonus_halves_when_count_quadruples() {
        let a = raw_state(vec![4], vec![vec![0.6, 0.4]], (-2.0f64).exp(), 1.0);
        let b = raw_state(vec![16], vec![vec![0.6, 0.4]], (-2.0f64).exp(), 1.0);
        let bonus_a = a.ucb_index(0).unwrap() - 0.4;
        let bonus_b = b.ucb_index(0).unwrap() - 0.4;
        assert!((bonus_a - 1.0).abs() < 1e-9);
        assert!((bonus_b - 0.5).abs() < 1e-9);
    }

    #[test]
    fn unobserved_channel_has_no_index() {
        let s = state(2, 1, 0.1);
        assert!(matches!(
            s.ucb_index(1).unwrap_err(),
            Error::UnobservedChannel(1)
        ));
    }

    #[test]
    fn initialization_phase_is_round_robin() {
        let mut s = state(4, 1, 0.01);
        let mut rng = RngStream::new(0, 0);
        assert_eq!(PolicyKind::MaximinUcb.select(&s, &mut rng), 0);
        s.update_samples(0, &[0.5]).unwrap();
        s.update_samples(1, &[0.5]).unwrap();
        assert_eq!(PolicyKind::MaximinUcb.select(&s, &mut rng), 2);
    }

    #[test]
    fn ties_break_toward_smallest_index() {
        let s = raw_state(
            vec![3, 3, 3],
            vec![vec![0.5], vec![0.5], vec![0.5]],
            0.1,
            1.0,
        );
        let mut rng = RngStream::new(0, 0);
        assert_eq!(PolicyKind::MaximinUcb.select(&s, &mut rng), 0);
        assert_eq!(PolicyKind::GreedyMaximin.select(&s, &mut rng), 0);
    }

    #[test]
    fn argmax_picks_highest_index() {
        // delta = 1 zeroes the bonus, so the indices are exactly the stored
        // row minima (0.5, 0.9, 0.7).
        let s = raw_state(
            vec![2, 2, 2],
            vec![vec![0.5], vec![0.9], vec![0.7]],
            1.0,
            1.0,
        );
        let mut rng = RngStream::new(0, 0);
        assert_eq!(PolicyKind::MaximinUcb.select(&s, &mut rng), 1);
    }

    #[test]
    fn oracle_returns_its_channel() {
        let s = state(5, 1, 0.2);
        let mut rng = RngStream::new(0, 0);
        assert_eq!(PolicyKind::Oracle(3).select(&s, &mut rng), 3);
    }

    #[test]
    fn observation_updates_match_the_sample_path() {
        let mut via_obs = state(2, 2, 0.1);
        let mut via_samples = state(2, 2, 0.1);
        via_obs
            .update(&Observation {
                round: 1,
                channel: 1,
                rewards: vec![0.25, 0.75],
            })
            .unwrap();
        via_samples.update_samples(1, &[0.25, 0.75]).unwrap();
        assert_eq!(via_obs, via_samples);
        assert!(matches!(
            via_obs
                .update(&Observation {
                    round: 2,
                    channel: 0,
                    rewards: vec![0.5],
                })
                .unwrap_err(),
            Error::RewardLengthMismatch { .. }
        ));
    }

    #[test]
    fn uniform_random_is_seed_deterministic_and_in_range() {
        let s = state(7, 1, 0.2);
        let mut a = RngStream::new(21, 4);
        let mut b = RngStream::new(21, 4);
        for _ in 0..500 {
            let x = PolicyKind::UniformRandom.select(&s, &mut a);
            let y = PolicyKind::UniformRandom.select(&s, &mut b);
            assert_eq!(x, y);
            assert!(x < 7);
        }
    }

    #[test]
    fn two_point_average() {
        let mut s = state(1, 1, 0.1);
        s.update_samples(0, &[0.5]).unwrap();
        s.update_samples(0, &[1.0]).unwrap();
        assert_eq!(s.emp_mean(0, 0), Some(0.75));
        assert_eq!(s.counts(), &[2]);
    }

    #[test]
    fn updates_do_not_touch_other_rows() {
        let mut s = state(3, 2, 0.1);
        s.update_samples(0, &[0.25, 0.75]).unwrap();
        let row0 = [s.emp_mean(0, 0).unwrap(), s.emp_mean(0, 1).unwrap()];
        s.update_samples(1, &[1.0, 0.0]).unwrap();
        s.update_samples(1, &[0.0, 1.0]).unwrap();
        assert_eq!(row0[0].to_bits(), s.emp_mean(0, 0).unwrap().to_bits());
        assert_eq!(row0[1].to_bits(), s.emp_mean(0, 1).unwrap().to_bits());
    }

    #[test]
    fn update_rejects_wrong_reward_length() {
        let mut s = state(2, 2, 0.1);
        assert!(matches!(
            s.update_samples(0, &[0.5]).unwrap_err(),
            Error::RewardLengthMismatch {
                got: 1,
                expected: 2
            }
        ));
        assert!(matches!(
            s.update_samples(9, &[0.5, 0.5]).unwrap_err(),
            Error::ChannelOutOfRange { index: 9, .. }
        ));
    }

    #[test]
    fn thousand_sequential_updates_match_batch_mean() {
        let mut rng = RngStream::new(33, 0);
        let mut s = state(1, 1, 0.1);
        let mut values = Vec::new();
        for _ in 0..1000 {
            let x: f64 = rng.random();
            values.push(x);
            s.update_samples(0, &[x]).unwrap();
        }
        let batch = kahan_mean(&values);
        assert!((s.emp_mean(0, 0).unwrap() - batch).abs() < 1e-12);
    }

    #[test]
    fn ten_thousand_step_random_update_sequence_matches_batch_means() {
        let mut rng = RngStream::new(34, 0);
        let m = 4;
        let p = 3;
        let mut s = state(m, p, 0.1);
        let mut per_pair: Vec<Vec<f64>> = vec![Vec::new(); m * p];
        for _ in 0..10_000 {
            let channel = rng.random_range(0..m);
            let rewards: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
            for (j, &x) in rewards.iter().enumerate() {
                per_pair[channel * p + j].push(x);
            }
            s.update_samples(channel, &rewards).unwrap();
        }
        for i in 0..m {
            for j in 0..p {
                if per_pair[i * p + j].is_empty() {
                    continue;
                }
                let batch = kahan_mean(&per_pair[i * p + j]);
                let inc = s.emp_mean(i, j).unwrap();
                assert!((inc - batch).abs() < 1e-12, "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn index_is_monotone_in_sigma_delta_and_count() {
        let means = vec![vec![0.3, 0.7]];
        let base = raw_state(vec![8], means.clone(), 0.05, 1.0)
            .ucb_index(0)
            .unwrap();
        let wider = raw_state(vec![8], means.clone(), 0.05, 2.0)
            .ucb_index(0)
            .unwrap();
        let tighter_delta = raw_state(vec![8], means.clone(), 0.005, 1.0)
            .ucb_index(0)
            .unwrap();
        let more_pulls = raw_state(vec![32], means, 0.05, 1.0).ucb_index(0).unwrap();
        assert!(wider >= base);
        assert!(tighter_delta >= base);
        assert!(more_pulls < base);
    }

    proptest! {
        #[test]
        fn count_conservation(actions in proptest::collection::vec(0usize..5, 0..200)) {
            let mut s = state(5, 2, 0.1);
            for (k, &a) in actions.iter().enumerate() {
                s.update_samples(a, &[k as f64, 1.0 - k as f64]).unwrap();
            }
            let total: u64 = s.counts().iter().sum();
            prop_assert_eq!(total, actions.len() as u64);
            prop_assert_eq!(s.round(), actions.len() as u64);
        }

        #[test]
        fn shifting_all_means_shifts_every_index_and_keeps_the_argmax(
            rows in proptest::collection::vec(
                proptest::collection::vec(0.0f64..1.0, 3),
                4,
            ),
            counts in proptest::collection::vec(1u64..50, 4),
            shift in -10.0f64..10.0,
        ) {
            let s = raw_state(counts.clone(), rows.clone(), 0.05, 1.0);
            let shifted_rows: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| r.iter().map(|&x| x + shift).collect())
                .collect();
            let t = raw_state(counts, shifted_rows, 0.05, 1.0);
            let mut rng_a = RngStream::new(0, 0);
            let mut rng_b = RngStream::new(0, 0);
            for i in 0..4 {
                let before = s.ucb_index(i).unwrap();
                let after = t.ucb_index(i).unwrap();
                prop_assert!((after - (before + shift)).abs() < 1e-9);
            }
            prop_assert_eq!(
                PolicyKind::MaximinUcb.select(&s, &mut rng_a),
                PolicyKind::MaximinUcb.select(&t, &mut rng_b)
            );
        }

        #[test]
        fn incremental_means_track_batch_means(
            rewards in proptest::collection::vec(0.0f64..1.0, 1..300),
        ) {
            let mut s = state(1, 1, 0.1);
            for &x in &rewards {
                s.update_samples(0, &[x]).unwrap();
            }
            let batch = kahan_mean(&rewards);
            prop_assert!((s.emp_mean(0, 0).unwrap() - batch).abs() < 1e-12);
        }
    }
}
