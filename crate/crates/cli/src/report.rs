//! The `<name>.report.json` document written next to each table.

use std::collections::BTreeMap;

use qha::metrics::Outcome;
use serde::Serialize;

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

/// A value published alongside the figure this experiment mirrors, next to
/// what this run computed. Informational: grids and parameters differ.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub label: String,
    pub published: f64,
    pub computed: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub config_hash: String,
    pub version: String,
    pub config: ExperimentConfig,
    /// Resolved parameters, defaults included.
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub comparisons: Vec<Comparison>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Report {
            experiment: config.experiment.clone(),
            config_hash: config.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            parameters: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            checks: Vec::new(),
            comparisons: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    pub fn tolerance(&mut self, key: &str, value: f64) {
        self.tolerances.insert(key.to_string(), value);
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.check_outcome(name, if ok { Outcome::Pass } else { Outcome::Fail }, detail);
    }

    pub fn check_outcome(&mut self, name: &str, outcome: Outcome, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), outcome, detail: detail.into() });
    }

    pub fn compare(&mut self, label: &str, published: f64, computed: f64) {
        self.comparisons.push(Comparison { label: label.to_string(), published, computed });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.outcome.is_failure())
    }

    pub fn outcome_of(&self, name: &str) -> Option<Outcome> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.outcome)
    }
}
