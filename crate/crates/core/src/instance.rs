//! Problem instances: the channel-by-node mean matrix, reward families, and
//! deterministic reward sampling.
//!
//! An instance is an `m x p` matrix of means. Selecting channel `i` in a
//! round yields one reward per node `j`, drawn independently from the
//! per-pair distribution with mean `means[i][j]`. All per-pair distributions
//! are sub-Gaussian with a common scale `sigma`.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rng::RngStream;
use crate::scalar::{from_f64, Real};

/// Per-pair reward distribution family.
///
/// `Bernoulli` draws 0/1 rewards and requires means in [0, 1].
/// `Gaussian` draws `mean + sigma * Z` with `Z` standard normal.
/// `GaussianTruncated` rejection-samples the same Gaussian until the draw
/// lands in [0, 1]; the instance mean is the pre-truncation location
/// parameter, so the realized mean is pulled toward 1/2 unless the
/// distribution is symmetric within the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardFamily {
    Bernoulli,
    Gaussian,
    GaussianTruncated,
}

impl fmt::Display for RewardFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewardFamily::Bernoulli => write!(f, "bernoulli"),
            RewardFamily::Gaussian => write!(f, "gaussian"),
            RewardFamily::GaussianTruncated => write!(f, "gaussian-truncated"),
        }
    }
}

impl RewardFamily {
    /// Families whose support is confined to [0, 1] validate their means.
    fn requires_unit_means(self) -> bool {
        matches!(
            self,
            RewardFamily::Bernoulli | RewardFamily::GaussianTruncated
        )
    }
}

/// A validated maximin bandit instance: the mean matrix plus the reward
/// model. Immutable after construction and safe to share across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance<R> {
    means: Vec<R>, // row-major, m rows of p entries
    channels: usize,
    nodes: usize,
    sigma: R,
    family: RewardFamily,
}

impl<R: Real> ProblemInstance<R> {
    /// Build an instance from a row-per-channel matrix of means.
    ///
    /// Rejects empty or ragged matrices, non-finite entries, means outside
    /// [0, 1] for bounded families, and non-positive sigma.
    pub fn new(rows: Vec<Vec<R>>, sigma: R, family: RewardFamily) -> Result<Self, Error> {
        let channels = rows.len();
        let nodes = rows.first().map_or(0, Vec::len);
        if channels == 0 || nodes == 0 || rows.iter().any(|r| r.len() != nodes) {
            return Err(Error::MalformedMatrix);
        }
        let sigma_f = sigma.to_f64().unwrap_or(f64::NAN);
        if !sigma_f.is_finite() || sigma_f <= 0.0 {
            return Err(Error::InvalidSigma(sigma_f));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &mu) in row.iter().enumerate() {
                if !mu.is_finite() {
                    return Err(Error::NonFiniteMean {
                        channel: i,
                        node: j,
                    });
                }
                if family.requires_unit_means() && (mu < R::zero() || mu > R::one()) {
                    return Err(Error::MeanOutOfRange {
                        family,
                        channel: i,
                        node: j,
                        value: mu.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        let means = rows.into_iter().flatten().collect();
        Ok(Self {
            means,
            channels,
            nodes,
            sigma,
            family,
        })
    }

    /// Number of channels m.
    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Number of nodes p.
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn sigma(&self) -> R {
        self.sigma
    }

    pub fn family(&self) -> RewardFamily {
        self.family
    }

    /// Mean reward of node `node` on channel `channel`.
    pub fn mean(&self, channel: usize, node: usize) -> R {
        assert!(channel < self.channels && node < self.nodes);
        self.means[channel * self.nodes + node]
    }

    /// One channel's row of means.
    pub fn row(&self, channel: usize) -> &[R] {
        assert!(channel < self.channels);
        &self.means[channel * self.nodes..(channel + 1) * self.nodes]
    }

    /// Minimum mean across nodes for one channel.
    pub fn row_min(&self, channel: usize) -> Result<R, Error> {
        if channel >= self.channels {
            return Err(Error::ChannelOutOfRange {
                index: channel,
                channels: self.channels,
            });
        }
        let row = self.row(channel);
        Ok(row.iter().copied().fold(row[0], R::min))
    }

    /// Draw one reward per node for the selected channel, appending into
    /// `out`. Nodes are sampled in column order j = 0..p so traces are
    /// byte-reproducible.
    pub fn sample_rewards_into(
        &self,
        channel: usize,
        rng: &mut RngStream,
        out: &mut Vec<R>,
    ) -> Result<(), Error> {
        if channel >= self.channels {
            return Err(Error::ChannelOutOfRange {
                index: channel,
                channels: self.channels,
            });
        }
        out.clear();
        let sigma = self.sigma.to_f64().expect("sigma is finite");
        for node in 0..self.nodes {
            let mean = self.mean(channel, node).to_f64().expect("mean is finite");
            out.push(from_f64(draw_reward(self.family, mean, sigma, rng)));
        }
        Ok(())
    }

    /// Draw one reward per node for the selected channel.
    pub fn sample_rewards(&self, channel: usize, rng: &mut RngStream) -> Result<Vec<R>, Error> {
        let mut out = Vec::with_capacity(self.nodes);
        self.sample_rewards_into(channel, rng, &mut out)?;
        Ok(out)
    }
}

/// Draw a single reward. Sampling is performed in `f64` regardless of the
/// instance scalar type, so `f32` and `f64` instances consume identical
/// stream positions.
pub(crate) fn draw_reward(family: RewardFamily, mean: f64, sigma: f64, rng: &mut RngStream) -> f64 {
    match family {
        RewardFamily::Bernoulli => {
            // random::<f64>() is uniform on [0, 1), so mean = 1 always
            // succeeds and mean = 0 never does.
            let u: f64 = rng.random();
            if u < mean {
                1.0
            } else {
                0.0
            }
        }
        RewardFamily::Gaussian => {
            let z: f64 = rng.sample(StandardNormal);
            mean + sigma * z
        }
        RewardFamily::GaussianTruncated => loop {
            let z: f64 = rng.sample(StandardNormal);
            let x = mean + sigma * z;
            if (0.0..=1.0).contains(&x) {
                break x;
            }
        },
    }
}
