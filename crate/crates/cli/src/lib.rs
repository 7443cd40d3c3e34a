//! Config parsing and experiment driver behind the `destiny` binary.

pub mod config;
pub mod experiment;
pub mod trace;

pub use config::{parse_config, parse_config_str, ConfigError, DataSource, ExperimentConfig};
pub use experiment::{build_network, run_experiment, ExperimentError, ExperimentReport};
pub use trace::{read_trace_csv, write_trace_csv, TRACE_HEADER};
