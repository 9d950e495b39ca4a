//! Auto-calibration tests for regression functions with finite prediction
//! ranges.
//!
//! A predictor is auto-calibrated when, within every cohort sharing the same
//! predicted value, the responses average out to that value: each prediction
//! level pays for itself. This crate provides seven hypothesis tests of that
//! property, their null distributions (closed-form where available, seeded
//! Monte Carlo otherwise), p-values, and a simulation harness for size and
//! power studies.
//!
//! The tests share one ingredient, the per-level increment vector S
//! ([`stats::increments`]): cohort means of response minus prediction.
//! They differ in how they aggregate it:
//!
//! - max-type on levels: scaled max |S_k|, jointly (`T1a`) or per-level
//!   normalized (`T1b`);
//! - max-type on walks: scaled max |T_k| over prefix sums (`T2a`) or suffix
//!   sums (`T2b`), compared against a Gaussian random-walk maximum;
//! - quadratic: weighted (`T3a`) and unweighted (`T3b`) sums of squares with
//!   weighted chi-square limits, and the classical chi-square form (`T3c`).
//!
//! Start with the runnable examples: `run_tests` (full report on one
//! sample), `quantile_table` (critical values for a model), `covariance_check`
//! (simulated vs theoretical limit covariances), `power_curves`
//! (contamination power study), `binning_and_lift` (continuous predictions),
//! and `csv_report` (the file-based workflow the `autocal` binary wraps).

pub mod asymptotics;
pub mod cli;
pub mod data;
pub mod error;
pub mod io;
pub mod rng;
pub mod simulation;
pub mod special;
pub mod stats;
pub mod testing;

mod accum;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Version tag written into every serialized artifact.
pub const FORMAT_VERSION: u32 = 1;

/// Fixed description of the random number pipeline, recorded alongside any
/// Monte Carlo output. Changing the pipeline changes published numbers, so
/// the identifier is part of the output contract.
pub const RNG_SPEC: &str =
    "chacha8(splitmix64 seed, one substream per work item); polar normal; marsaglia-tsang gamma";
