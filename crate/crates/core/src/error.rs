use thiserror::Error;

use crate::instance::RewardFamily;

/// Errors raised by instance construction, policies, simulation, and
/// aggregation.
#[derive(Debug, Error)]
pub enum Error {
    /// The mean matrix is empty or its rows have differing lengths.
    #[error("means matrix must be non-empty and rectangular")]
    MalformedMatrix,
    #[error("mean at channel {channel}, node {node} is not finite")]
    NonFiniteMean { channel: usize, node: usize },
    /// A mean falls outside the support required by the reward family.
    #[error("{family} mean outside [0, 1] at channel {channel}, node {node}: {value}")]
    MeanOutOfRange {
        family: RewardFamily,
        channel: usize,
        node: usize,
        value: f64,
    },
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("channel index {index} out of range for m = {channels}")]
    ChannelOutOfRange { index: usize, channels: usize },
    /// The caller asked for a UCB index before the channel was sampled;
    /// the initialization phase must run first.
    #[error("channel {0} has no observations yet")]
    UnobservedChannel(usize),
    #[error("observation carries {got} rewards, expected p = {expected}")]
    RewardLengthMismatch { got: usize, expected: usize },
    #[error("horizon must be positive")]
    ZeroHorizon,
    #[error("horizon must be at least m (got horizon {horizon}, m {channels})")]
    HorizonTooShort { horizon: u64, channels: usize },
    #[error("aggregation needs at least two traces, got {0}")]
    TooFewTraces(usize),
    #[error("traces disagree on horizon: {0} vs {1}")]
    HorizonMismatch(u64, u64),
    #[error("checkpoint {checkpoint} outside [1, {horizon}]")]
    CheckpointOutOfRange { checkpoint: u64, horizon: u64 },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
