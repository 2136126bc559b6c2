//! Experiment configuration: one JSON document, overridable from the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Everything that determines a run. `out`, `svg` and `threads` do not affect
/// the numbers and are left out of the hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub trials: Option<usize>,
    /// Experiment-specific parameters; unset keys take the experiment defaults.
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_svg")]
    pub svg: bool,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

fn default_svg() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentConfig {
            experiment: experiment.into(),
            d: None,
            seed: 0,
            n: None,
            trials: None,
            params: BTreeMap::new(),
            out: default_out(),
            svg: default_svg(),
            threads: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Hex SHA-256 of the canonical JSON of the numeric part of the config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::json!({
            "experiment": self.experiment,
            "d": self.d,
            "seed": self.seed,
            "n": self.n,
            "trials": self.trials,
            "params": self.params,
        });
        hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
    }

    pub fn param_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| CliError::Config(format!("`{key}` must be a number"))),
        }
    }

    pub fn param_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| CliError::Config(format!("`{key}` must be a non-negative integer"))),
        }
    }

    pub fn param_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| CliError::Config(format!("`{key}` must hold numbers"))))
                .collect(),
            Some(_) => Err(CliError::Config(format!("`{key}` must be an array of numbers"))),
        }
    }

    pub fn param_usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_u64()
                        .map(|x| x as usize)
                        .ok_or_else(|| CliError::Config(format!("`{key}` must hold non-negative integers")))
                })
                .collect(),
            Some(_) => Err(CliError::Config(format!("`{key}` must be an array of integers"))),
        }
    }
}
