//! Experiment runner for `gplab-core`: configuration, reports, plot data.

pub mod config;
pub mod plot;
pub mod report;
pub mod run;

pub use config::{Experiment, ExperimentConfig};
pub use plot::{emit_plotdata, PlotKind};
pub use report::{Check, RunReport};
pub use run::run;
