//! Simulation harness for the `tvgain-core` estimator: experiment configs,
//! input signals, baseline estimators, CSV traces and JSON reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod report;
pub mod sim;
pub mod trace;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use report::RunReport;
