//! Experiment harness: config ingestion, seeded Monte Carlo drivers, and
//! persisted result records.
//!
//! A run goes config → driver → records:
//!
//! * [`config`] parses plain-text `key = value` experiment descriptions into
//!   [`ExperimentConfig`] and validates every field.
//! * [`runner`] executes the experiment: trials fan out across worker
//!   threads with seeds derived per (master, energy, trial), so any thread
//!   count and any rerun of the same config produces bit-identical records;
//!   energies an experiment cannot use yield explicit rejection records.
//! * [`record`] defines the self-describing [`ExperimentRecord`] and its two
//!   exports: append-safe line-delimited JSON with full-precision reals, and
//!   a flat CSV for plotting.

pub mod config;
pub mod record;
pub mod runner;

pub use config::{ConfigError, CurveSpec, ExperimentConfig, ExperimentKind};
pub use record::{
    append_jsonl, read_jsonl, to_json_line, write_csv, write_jsonl, ExperimentRecord, CODE_VERSION,
};
pub use runner::{
    run, run_expectation, run_scaling_suite, run_singular, run_variance, HarnessError,
    BOOTSTRAP_RESAMPLES, DEFAULT_LAMBDA_GRID, DEFAULT_RIESZ_EXPONENTS, DEFAULT_XI_SAMPLES,
    MIN_VARIANCE_TRIALS,
};
