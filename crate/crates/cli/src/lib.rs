//! Batch driver: loads algebra/module/kernel/unit descriptors, runs named
//! verification experiments and emits machine-readable CSV reports.
//!
//! Experiments are independent and deterministic: identical configuration
//! and seed produce byte-identical reports. Report assembly is
//! single-threaded so row order is fixed.

#![allow(clippy::needless_range_loop)]

use thiserror::Error;

pub mod config;
pub mod criteria;
pub mod experiments;
pub mod report;

pub use config::ExperimentConfig;
pub use report::{Report, ReportRow};

/// Driver-level failures: I/O, parsing, or an error from the computation
/// layer. Tolerance violations are report rows, not errors.
#[derive(Debug, Error)]
pub enum DriverError {
    #[error("{0}: {1}")]
    Io(String, String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] prodsys::Error),
    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),
}

/// The experiment dispatcher. `decompose-tuple` additionally returns a line
/// for stdout (the bracket rendering of the decomposition).
pub fn run_experiment(
    name: &str,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<(Report, Option<String>), DriverError> {
    match name {
        "check-cpd" => Ok((experiments::check_cpd(config)?, None)),
        "kolmogorov" => Ok((experiments::kolmogorov(config)?, None)),
        "ce-split" => Ok((experiments::ce_split(config)?, None)),
        "semigroup" => Ok((experiments::semigroup(config)?, None)),
        "trotter-converge" => Ok((experiments::trotter_converge(config)?, None)),
        "product-index" => Ok((experiments::product_index(config)?, None)),
        "decompose-tuple" => {
            let (report, brackets) = experiments::decompose_tuple(config)?;
            Ok((report, Some(brackets)))
        }
        "free-flow-verify" => Ok((experiments::free_flow_verify(config)?, None)),
        "suite" => Ok((experiments::suite(seed), None)),
        other => Err(DriverError::UnknownExperiment(other.to_string())),
    }
}
