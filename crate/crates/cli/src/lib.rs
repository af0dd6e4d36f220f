//! Scenario configs, runs, sweeps and identity checks on top of
//! `zstab-core`, with CSV (and optional SVG) outputs that embed the config
//! and code version.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

pub use commands::{run_1d, run_2d, sweep_error, sweep_rows, verify, verify_reports, RunRecord, SweepRow};
pub use config::{ScenarioConfig, SchemeChoice};
pub use error::{CliError, CliResult};
