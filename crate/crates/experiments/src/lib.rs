//! Experiment runner for the `localdiss` CLI: config resolution, drivers and
//! CSV/manifest output.

pub mod config;
pub mod error;
pub mod run;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{Error, Result};
pub use run::{run_experiment, sweep_gamma, Manifest, RunOutput, SpectrumRow};
