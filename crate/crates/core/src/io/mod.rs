//! Configuration, result tables and the run manifest.

pub mod config;
pub mod output;
mod run;

pub use config::{emit_config, parse_config, Experiment, RunConfig, OUTPUT_DIR_ENV};
pub use output::{emit_results, fmt_float, Manifest, Table};
pub use run::{execute, run_experiment, RunOutput};
