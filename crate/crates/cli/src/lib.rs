//! Experiment harness around `paras-core`: settings, repeated runs,
//! aggregation, and result files.

pub mod batch;
pub mod config;
pub mod report;
pub mod table;

pub use batch::{run_batch, run_batch_with, run_once, BatchResult};
pub use config::{build_experiments, parse_config, EngineOverrides, ExperimentConfig, OutputFormat, RunMode};
pub use report::{read_results, write_csv, write_json, Aggregate, ConfigKey, RunRow, Summary};
