//! Experiment harness for `fairteams`: metrics, CSV formats, method
//! dispatch, seed sweeps and the `fairteams` command line.

pub mod assignment;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod method;
pub mod metrics;

pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentResult, RunFailure, TaskParams};
pub use method::{GaSettings, Greedy, Method, SolveSettings};
pub use metrics::{evaluate_solution, MetricsRecord};
