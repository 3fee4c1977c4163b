//! Coverage-based regression test prioritization.
//!
//! The crate orders a test suite by the code units each test covers. Seven
//! strategies are provided; [`strategies::ocp`] is a lazy variant of
//! additional-greedy that keeps the last computed additional coverage of every
//! candidate in descending partitions and only refreshes the partitions that
//! can still hold the best candidate.
//!
//! Alongside the strategies sit the evaluation metrics (APFD, APSC), the
//! rank statistics used to compare strategies, and an experiment harness that
//! backs the `testorder` command line tool.

pub mod coverage;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod stats;
pub mod strategies;

pub use coverage::{
    aggregate_rows, BitRow, CoverageMatrix, GroupMap, Instrumentation, KillMatrix, MatrixFormat,
    Ordering,
};
pub use error::{Error, Result};
pub use evaluation::{apfd, apsc, summarize_efficiency, ApfdRecord, EfficiencyRow};
pub use stats::{compare, mann_whitney_u, vargha_delaney_a12, StatSummary, Verdict};
pub use strategies::{run_strategy, GaConfig, StrategyConfig, StrategyId};
