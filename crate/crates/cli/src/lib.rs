//! Experiment harness for the spike-mh trainers: configuration files, seed
//! sweeps, CSV logging, native SVG reward curves and comparison tables.

pub mod config;
pub mod experiment;
pub mod logs;
pub mod plot;
pub mod report;

pub use config::{Algo, ConfigFile, ExperimentConfig};
pub use experiment::{run_experiment, RunSummary, SeedSummary};
pub use report::{emit_table, moving_average, round_to_decade};
