//! Plain-text scenario configuration.
//!
//! Scenario files are TOML documents with the schema below. Every field has
//! a default, so an empty document describes the bundled reference setup
//! (the 6x5 affine grid, Bernoulli rewards, sigma 1, horizon 50000,
//! delta = 1/horizon, 1000 replications, seed 42).
//!
//! ```toml
//! horizon = 50000
//! replications = 1000
//! seed = 42
//! sigma = 1.0
//! family = "bernoulli"          # bernoulli | gaussian | gaussian-truncated
//! policy = "maximin-ucb"        # maximin-ucb | uniform-random | greedy-maximin | oracle
//! # checkpoints = [1000, 50000] # optional; default: 50 log-spaced rounds
//!
//! [delta]
//! rule = "inverse-horizon"      # inverse-horizon | inverse-horizon-squared | fixed
//! # value = 0.001               # required iff rule = "fixed"
//!
//! [instance]
//! generator = "affine-grid"     # affine-grid | explicit
//! g = 0.05
//! m = 6
//! p = 5
//! # means = [[0.5, 0.6], ...]   # used by generator = "explicit"
//!
//! [sweep]                       # only read by the sweep commands
//! gaps = [0.03, 0.04, 0.05, 0.06, 0.07]
//! channels = [4, 6, 8]
//! nodes = [4, 6, 8]
//!
//! [concentration]               # only read by the concentration command
//! family = "gaussian"
//! mean = 0.0
//! sigma = 1.0
//! samples = 100
//! epsilon = 0.5
//! trials = 10000
//! ```
//!
//! Overrides use dotted keys (`delta.rule=fixed`, `instance.g=0.03`,
//! `sweep.gaps=[0.03,0.07]`) so scenario files stay canonical.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::experiments::{DeltaRule, InstanceGenerator, PolicyChoice, ScenarioConfig};
use crate::instance::RewardFamily;

/// Keys accepted by `--set` overrides.
pub const ALLOWED_OVERRIDE_KEYS: &[&str] = &[
    "horizon",
    "replications",
    "seed",
    "sigma",
    "family",
    "policy",
    "checkpoints",
    "delta.rule",
    "delta.value",
    "instance.generator",
    "instance.g",
    "instance.m",
    "instance.p",
    "instance.means",
    "sweep.gaps",
    "sweep.channels",
    "sweep.nodes",
    "concentration.family",
    "concentration.mean",
    "concentration.sigma",
    "concentration.samples",
    "concentration.epsilon",
    "concentration.trials",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
    #[error("config {path} does not match the scenario schema: {source}")]
    Schema {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
    #[error("override must look like key=value, got `{0}`")]
    MalformedOverride(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid override `{key}`: {message}")]
    BadOverride { key: String, message: String },
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl ConfigError {
    /// File-level problems (missing file, TOML syntax, schema mismatch in
    /// the file itself) versus semantic problems in overrides or values.
    pub fn is_parse_failure(&self) -> bool {
        matches!(
            self,
            ConfigError::Read { .. } | ConfigError::Parse { .. } | ConfigError::Schema { .. }
        )
    }
}

/// The on-disk scenario schema. Unknown top-level keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_family")]
    pub family: RewardFamily,
    #[serde(default)]
    pub policy: PolicyChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default)]
    pub delta: DeltaSection,
    #[serde(default)]
    pub instance: InstanceGenerator,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub concentration: ConcentrationSection,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        toml::Table::new()
            .try_into()
            .expect("empty table satisfies the schema defaults")
    }
}

fn default_horizon() -> u64 {
    50_000
}
fn default_replications() -> u32 {
    1_000
}
fn default_seed() -> u64 {
    42
}
fn default_sigma() -> f64 {
    1.0
}
fn default_family() -> RewardFamily {
    RewardFamily::Bernoulli
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaRuleName {
    InverseHorizon,
    InverseHorizonSquared,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSection {
    pub rule: DeltaRuleName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Default for DeltaSection {
    fn default() -> Self {
        Self {
            rule: DeltaRuleName::InverseHorizon,
            value: None,
        }
    }
}

impl DeltaSection {
    pub fn to_rule(self) -> Result<DeltaRule, Error> {
        match (self.rule, self.value) {
            (DeltaRuleName::InverseHorizon, None) => Ok(DeltaRule::InverseHorizon),
            (DeltaRuleName::InverseHorizonSquared, None) => Ok(DeltaRule::InverseHorizonSquared),
            (DeltaRuleName::Fixed, Some(value)) => Ok(DeltaRule::Fixed(value)),
            (DeltaRuleName::Fixed, None) => Err(Error::InvalidScenario(
                "delta.rule = \"fixed\" requires delta.value".into(),
            )),
            (_, Some(_)) => Err(Error::InvalidScenario(
                "delta.value is only meaningful with delta.rule = \"fixed\"".into(),
            )),
        }
    }
}

/// Sweep lists consumed by the gap-sweep and scale-sweep commands; `None`
/// falls back to the bundled defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<usize>>,
}

/// Parameters of the concentration command. Defaults describe the Gaussian
/// reference check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationSection {
    pub family: RewardFamily,
    pub mean: f64,
    pub sigma: f64,
    pub samples: u64,
    pub epsilon: f64,
    pub trials: u64,
}

impl Default for ConcentrationSection {
    fn default() -> Self {
        Self {
            family: RewardFamily::Gaussian,
            mean: 0.0,
            sigma: 1.0,
            samples: 100,
            epsilon: 0.5,
            trials: 10_000,
        }
    }
}

impl ScenarioFile {
    /// Convert the parsed file into a runnable scenario.
    pub fn to_scenario(&self) -> Result<ScenarioConfig, Error> {
        Ok(ScenarioConfig {
            generator: self.instance.clone(),
            horizon: self.horizon,
            delta_rule: self.delta.to_rule()?,
            sigma: self.sigma,
            family: self.family,
            policy: self.policy,
            replications: self.replications,
            seed: self.seed,
            checkpoints: self.checkpoints.clone(),
        })
    }
}

/// Load a scenario: read `path` (or start from the built-in defaults), then
/// apply `key=value` overrides in order.
///
/// The file is merged over the materialized defaults, so dotted overrides
/// can replace a single nested field without restating its section. File
/// problems surface as parse failures; override problems surface as
/// semantic errors, including type mismatches introduced by an override.
pub fn load_scenario(
    path: Option<&Path>,
    overrides: &[String],
) -> Result<ScenarioFile, ConfigError> {
    let mut table = default_table();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let file_table: toml::Table = text.parse().map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source: Box::new(source),
        })?;
        // Validate the file itself before overrides touch it, so schema
        // violations are attributed to the right party.
        deserialize_file(file_table.clone()).map_err(|source| ConfigError::Schema {
            path: path.to_path_buf(),
            source,
        })?;
        deep_merge(&mut table, file_table);
    }
    for spec in overrides {
        apply_override(&mut table, spec)?;
        if let Err(source) = deserialize_file(table.clone()) {
            let key = spec.split('=').next().unwrap_or(spec).trim().to_string();
            return Err(ConfigError::BadOverride {
                key,
                message: source.message().to_string(),
            });
        }
    }
    deserialize_file(table.clone()).map_err(|source| ConfigError::BadOverride {
        key: "<merged config>".into(),
        message: source.message().to_string(),
    })
}

fn deserialize_file(table: toml::Table) -> Result<ScenarioFile, Box<toml::de::Error>> {
    table.try_into().map_err(Box::new)
}

/// The schema defaults as a raw table.
fn default_table() -> toml::Table {
    let value = toml::Value::try_from(ScenarioFile::default())
        .expect("default scenario serializes to TOML");
    match value {
        toml::Value::Table(table) => table,
        _ => unreachable!("a struct serializes to a table"),
    }
}

/// Merge `overlay` into `base`: tables merge recursively, everything else
/// replaces.
fn deep_merge(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(existing)), toml::Value::Table(incoming)) => {
                deep_merge(existing, incoming)
            }
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

/// Apply one `key=value` override onto the raw TOML table.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), ConfigError> {
    let (key, raw_value) = spec
        .split_once('=')
        .ok_or_else(|| ConfigError::MalformedOverride(spec.to_string()))?;
    let key = key.trim();
    let raw_value = raw_value.trim();
    if key.is_empty() {
        return Err(ConfigError::MalformedOverride(spec.to_string()));
    }
    if !ALLOWED_OVERRIDE_KEYS.contains(&key) {
        return Err(ConfigError::UnknownKey(key.to_string()));
    }
    let value = parse_toml_value(raw_value);

    let mut segments = key.split('.').peekable();
    let mut current = table;
    while let Some(segment) = segments.next() {
        if segments.peek().is_none() {
            current.insert(segment.to_string(), value);
            break;
        }
        let entry = current
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        if !entry.is_table() {
            // The file stored a scalar where the override expects a table;
            // replace it.
            *entry = toml::Value::Table(toml::Table::new());
        }
        current = entry.as_table_mut().expect("entry is a table");
    }
    Ok(())
}

/// Interpret the right-hand side as a TOML literal (number, bool, array,
/// quoted string); anything that does not parse is taken as a bare string.
fn parse_toml_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut table) => table.remove("v").expect("key v was just parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
