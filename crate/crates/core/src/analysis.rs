//! Regret bound evaluation, Monte Carlo aggregation, and the sub-Gaussian
//! concentration checker.
//!
//! Logarithms are natural throughout. Both bounds assume the confidence
//! parameter was set to 1/n^2 for the evaluated horizon n; they depend only
//! on the gap profile, sigma, and n, never on the number of nodes.

use crate::error::Error;
use crate::instance::{draw_reward, RewardFamily};
use crate::rng::RngStream;
use crate::scalar::{from_f64, from_u64, Real};
use crate::simulate::{GapProfile, SimulationTrace};

/// Normal-approximation multiplier for 95% confidence intervals.
pub const DEFAULT_CONFIDENCE_Z: f64 = 1.96;

/// Instance-dependent regret bound:
///
/// ```text
/// 3 * sum_i gap_i  +  sum_{gap_i > 0} 16 sigma^2 ln(n) / gap_i
/// ```
///
/// Channels with zero gap contribute nothing.
pub fn theorem1_bound<R: Real>(profile: &GapProfile<R>, sigma: R, n: u64) -> R {
    let three = from_f64::<R>(3.0);
    let sixteen = from_f64::<R>(16.0);
    let log_n = from_u64::<R>(n).ln();
    let gap_term = three * profile.sum_gaps();
    let explore_term = profile
        .gaps
        .iter()
        .filter(|&&g| g > R::zero())
        .map(|&g| sixteen * sigma * sigma * log_n / g)
        .fold(R::zero(), |a, b| a + b);
    gap_term + explore_term
}

/// Instance-independent regret bound:
///
/// ```text
/// 8 * sqrt(n * m * sigma^2 * ln(n))  +  3 * sum_i gap_i
/// ```
pub fn theorem2_bound<R: Real>(profile: &GapProfile<R>, sigma: R, n: u64) -> R {
    let three = from_f64::<R>(3.0);
    let eight = from_f64::<R>(8.0);
    let m = from_u64::<R>(profile.gaps.len() as u64);
    let n_r = from_u64::<R>(n);
    let log_n = n_r.ln();
    eight * (n_r * m * sigma * sigma * log_n).sqrt() + three * profile.sum_gaps()
}

/// Mean regret and confidence half-width per checkpoint, aggregated across
/// replications.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedRegret<R> {
    pub mean_regret: Vec<R>,
    pub ci_halfwidth: Vec<R>,
}

/// Aggregate replication traces at the given checkpoints with 95% intervals.
///
/// Per checkpoint: the sample mean across traces and the half-width
/// `z * sample_std / sqrt(R)` with z = 1.96. Values are summed in sorted
/// order, so the result is bit-identical under any permutation of the
/// traces.
pub fn aggregate_runs<R: Real>(
    traces: &[SimulationTrace<R>],
    checkpoints: &[u64],
) -> Result<AggregatedRegret<R>, Error> {
    aggregate_runs_with_confidence(traces, checkpoints, from_f64(DEFAULT_CONFIDENCE_Z))
}

/// [`aggregate_runs`] with a caller-chosen confidence multiplier.
pub fn aggregate_runs_with_confidence<R: Real>(
    traces: &[SimulationTrace<R>],
    checkpoints: &[u64],
    z: R,
) -> Result<AggregatedRegret<R>, Error> {
    if traces.len() < 2 {
        return Err(Error::TooFewTraces(traces.len()));
    }
    let horizon = traces[0].horizon;
    for t in traces {
        if t.horizon != horizon {
            return Err(Error::HorizonMismatch(horizon, t.horizon));
        }
    }
    for &c in checkpoints {
        if c == 0 || c > horizon {
            return Err(Error::CheckpointOutOfRange {
                checkpoint: c,
                horizon,
            });
        }
    }

    let count = from_u64::<R>(traces.len() as u64);
    let mut mean_regret = Vec::with_capacity(checkpoints.len());
    let mut ci_halfwidth = Vec::with_capacity(checkpoints.len());
    let mut values: Vec<R> = Vec::with_capacity(traces.len());
    for &c in checkpoints {
        values.clear();
        values.extend(traces.iter().map(|t| t.regret_at(c)));
        let mean = sorted_sum(&mut values) / count;
        for v in values.iter_mut() {
            let d = *v - mean;
            *v = d * d;
        }
        let variance = sorted_sum(&mut values) / (count - R::one());
        mean_regret.push(mean);
        ci_halfwidth.push(z * variance.sqrt() / count.sqrt());
    }
    Ok(AggregatedRegret {
        mean_regret,
        ci_halfwidth,
    })
}

/// Sum in ascending order for permutation-invariant rounding. Sorts the
/// buffer in place.
fn sorted_sum<R: Real>(values: &mut [R]) -> R {
    values.sort_by(|a, b| a.partial_cmp(b).expect("regret values are finite"));
    values.iter().copied().fold(R::zero(), |a, b| a + b)
}

/// Outcome of a Monte Carlo concentration experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationCheck {
    /// Fraction of trials with `|emp_mean - mean| >= epsilon`.
    pub observed_rate: f64,
    /// The sub-Gaussian tail bound `2 exp(-N eps^2 / (2 sigma^2))`.
    pub bound: f64,
    pub exceedances: u64,
    pub trials: u64,
}

/// Estimate the exceedance probability of an empirical mean and compare it
/// with the sub-Gaussian tail bound.
///
/// Each trial draws `sample_count` rewards from the family (Bernoulli uses
/// `mean` alone; the Gaussian families use `mean` and standard deviation
/// `sigma`) and tests whether the empirical mean misses `mean` by at least
/// `epsilon`. `sigma` is also the scale used in the analytic bound, so for
/// Bernoulli pass the sub-Gaussian parameter of the 0/1 distribution (1/2
/// at worst) rather than a sampling width.
pub fn concentration_check(
    family: RewardFamily,
    mean: f64,
    sigma: f64,
    sample_count: u64,
    epsilon: f64,
    trials: u64,
    rng: &mut RngStream,
) -> ConcentrationCheck {
    assert!(sample_count >= 1, "need at least one sample per trial");
    assert!(trials >= 1, "need at least one trial");
    assert!(epsilon >= 0.0, "epsilon must be nonnegative");
    assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
    if family == RewardFamily::Bernoulli {
        assert!(
            (0.0..=1.0).contains(&mean),
            "Bernoulli mean must be in [0, 1]"
        );
    }

    let n = sample_count as f64;
    let mut exceedances = 0u64;
    for _ in 0..trials {
        let mut sum = 0.0;
        for _ in 0..sample_count {
            sum += draw_reward(family, mean, sigma, rng);
        }
        if (sum / n - mean).abs() >= epsilon {
            exceedances += 1;
        }
    }
    ConcentrationCheck {
        observed_rate: exceedances as f64 / trials as f64,
        bound: 2.0 * (-n * epsilon * epsilon / (2.0 * sigma * sigma)).exp(),
        exceedances,
        trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(gaps: Vec<f64>) -> GapProfile<f64> {
        GapProfile {
            optimal: 0,
            optimal_value: 0.5,
            gaps,
        }
    }

    fn trace_with_final(final_regret: f64) -> SimulationTrace<f64> {
        SimulationTrace {
            horizon: 2,
            actions: vec![1, 1],
            regret_curve: vec![final_regret / 2.0, final_regret],
            final_counts: vec![0, 2],
        }
    }

    #[test]
    fn theorem1_is_zero_when_all_gaps_vanish() {
        assert_eq!(theorem1_bound(&profile(vec![0.0, 0.0]), 1.0, 100), 0.0);
    }

    #[test]
    fn theorem1_matches_hand_evaluation() {
        // gaps [0, 0.1], sigma 1, n 100:
        // 3 * 0.1 + 16 * ln(100) / 0.1 = 737.1272297580947.
        let b = theorem1_bound(&profile(vec![0.0, 0.1]), 1.0, 100);
        assert!((b - 737.1272297580947).abs() < 1e-9, "{b}");
    }

    #[test]
    fn theorem1_decreases_in_the_minimum_gap_on_the_sweep_range() {
        // For gaps in the experiment range the exploration term dominates
        // 3 * gap, so enlarging the minimum gap shrinks the bound.
        let bounds: Vec<f64> = [0.03, 0.04, 0.05, 0.06, 0.07]
            .iter()
            .map(|&g| theorem1_bound(&profile(vec![0.0, g]), 1.0, 50_000))
            .collect();
        for w in bounds.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn theorem2_at_horizon_one_is_three_sum_gaps() {
        let b = theorem2_bound(&profile(vec![0.0, 0.1, 0.3]), 1.0, 1);
        assert!((b - 1.2).abs() < 1e-12);
    }

    #[test]
    fn theorem2_matches_hand_evaluation() {
        // m 2, sigma 1, n 100, sum gaps 0.1:
        // 8 * sqrt(200 ln 100) + 0.3 = 243.0883413.
        let b = theorem2_bound(&profile(vec![0.0, 0.1]), 1.0, 100);
        assert!((b - 243.0883413).abs() < 1e-4, "{b}");
    }

    #[test]
    fn theorem2_scales_like_sqrt_n_at_large_horizons() {
        // Quadrupling n should double the sqrt term; at n about 10^6 the
        // log factor moves the ratio by under 5%.
        let p = profile(vec![0.0, 0.1]);
        let a = theorem2_bound(&p, 1.0, 1_000_000);
        let b = theorem2_bound(&p, 1.0, 4_000_000);
        let ratio = b / a;
        assert!((ratio - 2.0).abs() / 2.0 < 0.05, "ratio {ratio}");
    }

    #[test]
    fn bounds_are_nondecreasing_in_n_and_sigma() {
        let p = profile(vec![0.0, 0.05, 0.2]);
        let horizons = [2u64, 10, 100, 10_000, 1_000_000];
        for w in horizons.windows(2) {
            assert!(theorem1_bound(&p, 1.0, w[1]) >= theorem1_bound(&p, 1.0, w[0]));
            assert!(theorem2_bound(&p, 1.0, w[1]) >= theorem2_bound(&p, 1.0, w[0]));
        }
        for sigmas in [0.5f64, 1.0, 2.0, 4.0].windows(2) {
            assert!(theorem1_bound(&p, sigmas[1], 100) >= theorem1_bound(&p, sigmas[0], 100));
            assert!(theorem2_bound(&p, sigmas[1], 100) >= theorem2_bound(&p, sigmas[0], 100));
        }
    }

    #[test]
    fn identical_traces_aggregate_with_zero_halfwidth() {
        let traces = vec![trace_with_final(12.0); 5];
        let agg = aggregate_runs(&traces, &[1, 2]).unwrap();
        assert_eq!(agg.mean_regret, vec![6.0, 12.0]);
        assert_eq!(agg.ci_halfwidth, vec![0.0, 0.0]);
    }

    #[test]
    fn two_trace_aggregate_matches_hand_arithmetic() {
        // Finals 10 and 20: mean 15, sample std sqrt(50),
        // half-width 1.96 * sqrt(50) / sqrt(2) = 9.8.
        let traces = vec![trace_with_final(10.0), trace_with_final(20.0)];
        let agg = aggregate_runs(&traces, &[2]).unwrap();
        assert!((agg.mean_regret[0] - 15.0).abs() < 1e-12);
        assert!((agg.ci_halfwidth[0] - 9.8).abs() < 1e-9);
    }

    #[test]
    fn aggregation_is_permutation_invariant() {
        let traces: Vec<_> = [3.0, 1.5, 9.25, 0.5, 7.125]
            .iter()
            .map(|&f| trace_with_final(f))
            .collect();
        let mut reversed = traces.clone();
        reversed.reverse();
        let a = aggregate_runs(&traces, &[1, 2]).unwrap();
        let b = aggregate_runs(&reversed, &[1, 2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn aggregate_rejects_bad_inputs() {
        let one = vec![trace_with_final(1.0)];
        assert!(matches!(
            aggregate_runs(&one, &[1]).unwrap_err(),
            Error::TooFewTraces(1)
        ));
        let mut mixed = vec![trace_with_final(1.0), trace_with_final(2.0)];
        mixed[1].horizon = 3;
        assert!(matches!(
            aggregate_runs(&mixed, &[1]).unwrap_err(),
            Error::HorizonMismatch(2, 3)
        ));
        let ok = vec![trace_with_final(1.0), trace_with_final(2.0)];
        assert!(matches!(
            aggregate_runs(&ok, &[5]).unwrap_err(),
            Error::CheckpointOutOfRange { checkpoint: 5, .. }
        ));
    }

    #[test]
    fn zero_epsilon_gives_the_vacuous_bound() {
        let mut rng = RngStream::new(1, 0);
        let check = concentration_check(RewardFamily::Gaussian, 0.0, 1.0, 10, 0.0, 100, &mut rng);
        assert_eq!(check.bound, 2.0);
        assert!(check.observed_rate <= 1.0);
    }

    #[test]
    fn gaussian_exceedance_stays_under_the_bound() {
        let mut rng = RngStream::new(2, 0);
        let check =
            concentration_check(RewardFamily::Gaussian, 0.0, 1.0, 100, 0.5, 10_000, &mut rng);
        assert!((check.bound - 2.0 * (-12.5f64).exp()).abs() < 1e-15);
        assert!(check.observed_rate <= check.bound + 0.005);
    }

    #[test]
    fn bernoulli_exceedance_tracks_the_exact_binomial_tail() {
        // Exact oracle: P(|X/25 - 0.5| >= 0.3) for X ~ Bin(25, 1/2) is the
        // mass at X <= 5 plus X >= 20, computed with integer arithmetic.
        let mut tail_counts = 0u64;
        for k in 0..=25u64 {
            let phat = k as f64 / 25.0;
            if (phat - 0.5).abs() >= 0.3 {
                tail_counts += binomial(25, k);
            }
        }
        let exact = tail_counts as f64 / (1u64 << 25) as f64;
        assert!((exact - 0.004077).abs() < 1e-6);

        let mut rng = RngStream::new(3, 0);
        let check = concentration_check(
            RewardFamily::Bernoulli,
            0.5,
            0.5,
            25,
            0.3,
            100_000,
            &mut rng,
        );
        // The lemma bound with sigma = 1/2 is 2 exp(-4.5) ~ 0.0222 and must
        // dominate both the exact tail and the observation.
        assert!((check.bound - 2.0 * (-4.5f64).exp()).abs() < 1e-15);
        assert!(exact <= check.bound);
        assert!(check.observed_rate <= exact + 0.005);
        assert!(check.observed_rate <= 0.03);
    }

    fn binomial(n: u64, k: u64) -> u64 {
        let k = k.min(n - k);
        let mut num = 1u64;
        for i in 0..k {
            num = num * (n - i) / (i + 1);
        }
        num
    }
}
