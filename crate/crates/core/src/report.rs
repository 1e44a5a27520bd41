//! Experiment reports: aggregated regret curves with confidence intervals
//! and theoretical bound overlays, exported as CSV or JSON.
//!
//! The CSV schema is one row per (scenario, checkpoint) with columns
//! `scenario,checkpoint,mean_regret,ci_halfwidth,bound_t1,bound_t2`,
//! preceded by a `# replications=R` comment so the document round-trips to
//! the same in-memory report. Floats print in shortest round-trip form, so
//! parsing a report back yields bit-identical values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// One scenario's aggregated curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCurve<R> {
    pub label: String,
    /// Mean cumulative regret per checkpoint; nondecreasing.
    pub mean_regret: Vec<R>,
    /// 95% confidence half-width per checkpoint; nonnegative.
    pub ci_halfwidth: Vec<R>,
    /// Instance-dependent bound evaluated at each checkpoint.
    pub bound_t1: Vec<R>,
    /// Instance-independent bound evaluated at each checkpoint.
    pub bound_t2: Vec<R>,
}

/// Aggregated result of a whole experiment: several scenarios evaluated at
/// shared checkpoints across R replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport<R> {
    pub checkpoints: Vec<u64>,
    pub replications: u32,
    pub scenarios: Vec<ScenarioCurve<R>>,
}

/// Failure while parsing a report document.
#[derive(Debug, Error)]
#[error("invalid report CSV: {0}")]
pub struct ReportCsvError(pub String);

impl<R: Real> ExperimentReport<R> {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# replications={}", self.replications);
        out.push_str("scenario,checkpoint,mean_regret,ci_halfwidth,bound_t1,bound_t2\n");
        for scenario in &self.scenarios {
            for (idx, &checkpoint) in self.checkpoints.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    scenario.label,
                    checkpoint,
                    scenario.mean_regret[idx],
                    scenario.ci_halfwidth[idx],
                    scenario.bound_t1[idx],
                    scenario.bound_t2[idx],
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> String
    where
        R: Serialize,
    {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

impl ExperimentReport<f64> {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn from_csv(text: &str) -> Result<Self, ReportCsvError> {
        let mut lines = text.lines().peekable();
        let mut replications = None;
        while let Some(line) = lines.peek() {
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(value) = comment.trim().strip_prefix("replications=") {
                    replications = Some(
                        value
                            .trim()
                            .parse::<u32>()
                            .map_err(|e| ReportCsvError(format!("bad replications: {e}")))?,
                    );
                }
                lines.next();
            } else {
                break;
            }
        }
        let replications =
            replications.ok_or_else(|| ReportCsvError("missing # replications=".into()))?;
        let header = lines
            .next()
            .ok_or_else(|| ReportCsvError("missing header".into()))?;
        if header != "scenario,checkpoint,mean_regret,ci_halfwidth,bound_t1,bound_t2" {
            return Err(ReportCsvError(format!("unexpected header `{header}`")));
        }

        let mut checkpoints: Vec<u64> = Vec::new();
        let mut scenarios: Vec<ScenarioCurve<f64>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(ReportCsvError(format!(
                    "row {}: expected 6 fields, got {}",
                    lineno + 2,
                    fields.len()
                )));
            }
            let label = fields[0];
            let parse = |s: &str| -> Result<f64, ReportCsvError> {
                s.parse()
                    .map_err(|e| ReportCsvError(format!("row {}: {e}", lineno + 2)))
            };
            let checkpoint: u64 = fields[1]
                .parse()
                .map_err(|e| ReportCsvError(format!("row {}: {e}", lineno + 2)))?;

            let is_new = scenarios
                .last()
                .map(|s: &ScenarioCurve<f64>| s.label != label)
                .unwrap_or(true);
            if is_new {
                if scenarios.iter().any(|s| s.label == label) {
                    return Err(ReportCsvError(format!(
                        "scenario `{label}` rows are not contiguous"
                    )));
                }
                scenarios.push(ScenarioCurve {
                    label: label.to_string(),
                    mean_regret: Vec::new(),
                    ci_halfwidth: Vec::new(),
                    bound_t1: Vec::new(),
                    bound_t2: Vec::new(),
                });
            }
            let scenario = scenarios.last_mut().expect("pushed above");
            if scenarios_is_first(&checkpoints, scenario) {
                checkpoints.push(checkpoint);
            } else {
                let idx = scenario.mean_regret.len();
                if checkpoints.get(idx) != Some(&checkpoint) {
                    return Err(ReportCsvError(format!(
                        "scenario `{label}` checkpoints disagree with the first scenario"
                    )));
                }
            }
            scenario.mean_regret.push(parse(fields[2])?);
            scenario.ci_halfwidth.push(parse(fields[3])?);
            scenario.bound_t1.push(parse(fields[4])?);
            scenario.bound_t2.push(parse(fields[5])?);
        }
        if scenarios.is_empty() {
            return Err(ReportCsvError("report has no rows".into()));
        }
        for s in &scenarios {
            if s.mean_regret.len() != checkpoints.len() {
                return Err(ReportCsvError(format!(
                    "scenario `{}` has {} rows, expected {}",
                    s.label,
                    s.mean_regret.len(),
                    checkpoints.len()
                )));
            }
        }
        Ok(ExperimentReport {
            checkpoints,
            replications,
            scenarios,
        })
    }
}

// True while the first scenario's checkpoint column is still being read.
fn scenarios_is_first(checkpoints: &[u64], scenario: &ScenarioCurve<f64>) -> bool {
    scenario.mean_regret.len() == checkpoints.len()
}
