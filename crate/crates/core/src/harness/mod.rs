//! Configuration files, the experiment runner and the command line.
//!
//! Every CSV artifact starts with `#` lines naming the tool version, the
//! experiment and the SHA-256 of the canonical config, so identical configs
//! give byte-identical files unless `--timestamps` is set.

pub mod cli;
mod config;
mod run;

pub use config::{
    apply_override, BathSettings, Experiment, InitialState, MapSettings, RandomModel, ResourceSettings, RunConfig,
    TimeGrid, TrotterSettings, DEFAULT_TRUNCATION,
};
pub use run::{
    error_kind, error_line, exit_code, run, run_with, validate_model, RunOptions, RunReport, ValidationReport,
    TOOL_VERSION,
};
