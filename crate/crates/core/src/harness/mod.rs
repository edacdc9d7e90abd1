//! Reproducible experiments comparing the block-counting chain with its
//! Mittag–Leffler limit.
//!
//! A run is fully determined by its [`ExperimentConfig`]: every Monte Carlo
//! stream is derived from `seed`, and results do not depend on the number of
//! workers. Each [`Row`] carries the numbers its pass flag is computed from:
//! a row passes when `error < tolerance` or the error is exactly zero.
//! Sequences over increasing `n` use the previous row's error as tolerance,
//! and the last row additionally the configured threshold.

mod config;
mod experiments;
mod result;

pub use config::{load_config, Experiment, ExperimentConfig, Format};
pub use experiments::{
    run, run_ck_check, run_converge_dist, run_converge_moments, run_fdd, run_generator_check,
    run_semigroup_compare, run_subordinator_check,
};
pub use result::{
    render, render_csv, render_json, sequence_tolerances, within, write_results,
    ExperimentResult, Param, Row, CSV_HEADER,
};

use crate::error::Error;

/// Process exit codes.
pub mod exit_code {
    pub const PASS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
}

/// Exit code for the outcome of a run.
pub fn exit_code_for(outcome: &Result<ExperimentResult, Error>) -> i32 {
    match outcome {
        Ok(res) if res.all_pass() => exit_code::PASS,
        Ok(_) => exit_code::FAILURE,
        Err(Error::Config(_)) => exit_code::CONFIG,
        Err(_) => exit_code::FAILURE,
    }
}
