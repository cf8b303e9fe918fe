//! Experiment configuration: a single JSON file with optional command-line
//! overrides.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::DriverError;

/// Configuration of one experiment run. Fields omitted in the file fall back
/// to the built-in defaults (bundled fixtures, seed 42, stdout).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// One of: check-cpd, kolmogorov, ce-split, semigroup, trotter-converge,
    /// product-index, decompose-tuple, free-flow-verify, suite.
    #[serde(default)]
    pub experiment: Option<String>,
    /// Seed for every randomized instance; identical seeds replay exactly.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Report output path; stdout when omitted.
    #[serde(default)]
    pub out: Option<String>,
    /// Input file paths by role (kernel, unit_a, unit_b, bimodule_left,
    /// bimodule_right, free_unit).
    #[serde(default)]
    pub inputs: BTreeMap<String, String>,
    /// Tolerance overrides by name; all values must be positive.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub params: Params,
}

/// Numeric knobs of the experiments.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Params {
    /// Horizon for inner products and convergence studies.
    #[serde(default)]
    pub t: Option<f64>,
    /// Composition times (s, t) for semigroup checks.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    /// Particle-number truncation for quadratures.
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Quadrature step.
    #[serde(default)]
    pub h: Option<f64>,
    /// Trotter discretization sizes.
    #[serde(default)]
    pub ns: Option<Vec<usize>>,
    /// Real weights of the unit mean (must sum to one); default (1/2, 1/2).
    #[serde(default)]
    pub kappa: Option<Vec<f64>>,
    /// Tuple for decompose-tuple, leftmost entry first.
    #[serde(default)]
    pub tuple: Option<Vec<f64>>,
    /// Reference label for CE-splits.
    #[serde(default)]
    pub reference: Option<String>,
    /// Grid boundaries for the free index.
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, DriverError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DriverError::Io(path.display().to_string(), e.to_string()))?;
        let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
            DriverError::Parse(format!(
                "{}: line {}, column {}: {}",
                path.display(),
                e.line(),
                e.column(),
                e
            ))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        for (name, &tol) in &self.tolerances {
            if tol.is_nan() || tol <= 0.0 {
                return Err(DriverError::Parse(format!(
                    "tolerance '{name}' must be positive, got {tol}"
                )));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = r#"{
            "experiment": "semigroup",
            "seed": 7,
            "out": "report.csv",
            "inputs": {"kernel": "kernel.json"},
            "tolerances": {"semigroup": 1e-10},
            "params": {"times": [0.3, 0.7]}
        }"#;
        let c: ExperimentConfig = serde_json::from_str(text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.experiment.as_deref(), Some("semigroup"));
        assert_eq!(c.tolerance("semigroup", 1e-9), 1e-10);
        assert_eq!(c.params.times.as_deref(), Some(&[0.3, 0.7][..]));
    }

    #[test]
    fn rejects_nonpositive_tolerances() {
        let text = r#"{"tolerances": {"x": 0.0}}"#;
        let c: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert!(c.validate().is_err());
    }
}
