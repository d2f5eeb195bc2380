//! Seeded multi-trial clustering experiments: configuration, execution,
//! aggregation and table / figure-data output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use experiment::{run_experiment, DatasetReports, ExperimentOutcome, Metric, Summary, TrialRecord, TrialReport};
pub use output::{emit_plot_data, emit_table, write_outputs, PlotKind, TableFormat};
