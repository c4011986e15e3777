//! File formats, trial orchestration, statistics and reporting around
//! [`resetmon_core`].
//!
//! This crate carries everything that needs the standard library: the
//! explicit-state chain format and the HOA subset parser, the trial harness
//! with its oracle-based termination rule, JSON/CSV experiment reports, and
//! the `resetmon` command-line interface.

pub mod harness;
pub mod modelref;
pub mod parse;
pub mod report;
pub mod stats;

pub use harness::{
    run_trials, run_trials_on_product, ExperimentReport, MonitorSettings, RunConfig, RunError,
    TrialStats, Verdict as TrialVerdict,
};
pub use report::{emit_csv, emit_json, load_json};
