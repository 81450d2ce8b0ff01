//! Experiment harness for the pulsar classifier: configuration layering,
//! seeded pipeline runs, grid sweeps, and result tables.
//!
//! The binary front end lives in `main.rs`; everything it does beyond
//! argument parsing and printing is implemented here so it can be tested
//! directly.

pub mod config;
pub mod runner;
pub mod table;

pub use config::{paper_grid, ConfigError, ConfigFile, ConfigValues, ExperimentConfig};
pub use runner::{run_best_of, run_experiment, run_grid, run_grid_best_of, ResultRow, RowError};
pub use table::{emit_table, sort_for_presentation, TableError, TableFormat};
