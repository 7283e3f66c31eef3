//! CLI front end: configuration parsing, experiment drivers, CSV artifacts
//! and SVG plot emission.

pub mod config;
pub mod experiments;
pub mod svg;

pub use config::{parse_config, parse_config_str, ExperimentId, ExperimentSpec};
pub use experiments::run_experiment;
