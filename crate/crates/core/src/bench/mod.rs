//! Benchmark harness: suite runs, metrics, statistics and file formats.

pub mod cli;
pub mod config;
pub mod io;
pub mod metrics;
pub mod runner;
pub mod stats;

pub use config::{BaseDirection, BasePolicy, ExperimentConfig, Method, SuiteSource};
pub use metrics::{metrics_row, JerkAggregation, MetricsRow};
pub use runner::{angle_sweep, run_suite, BenchError, SweepRow};
pub use stats::{compare, compare_methods, welch_t_test, ComparisonReport};
