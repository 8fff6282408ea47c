//! Configuration, orchestration and artifact writing for `gpaf` experiments.

pub mod config;
pub mod experiment;

pub use config::{validate_config, ConfigError, ExperimentConfig, Mode, Validated};
pub use experiment::{run_experiment, ExperimentError, Outcome};
