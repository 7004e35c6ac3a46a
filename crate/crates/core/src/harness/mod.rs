//! Benchmark harness: data ingestion, Monte-Carlo studies, metrics,
//! configuration and report output.

pub mod config;
pub mod fetch;
pub mod io;
pub mod metrics;
pub mod report;
pub mod study;

pub use config::HarnessConfig;
pub use fetch::{fetch_remote, Fetcher};
pub use io::{ingest_csv, parse_csv, CsvOptions};
pub use metrics::{accuracy_rate, mse, AccuracySpec};
pub use report::{emit_report, Format, Output};
pub use study::{
    run_missing_data_study, run_noise_study, sea_level_standin, BenchCell, BenchReport, Condition,
    StudyConfig, StudyKind,
};
