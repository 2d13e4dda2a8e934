//! Experiment grid: cells, CSV persistence, aggregation and plots.

mod aggregate;
mod grid;
mod plots;
mod results;
mod sim;

pub use crate::env::{EnvironmentConfig, UserModel};
pub use aggregate::{aggregate, mean_sd, write_summary, GroupKey, SummaryRow};
pub use grid::{
    resolve_domain, run_cell, run_grid, Algorithm, CellKey, CellResult, GridConfig, GridOutcome, Precision,
};
pub use plots::emit_plots;
pub use results::{read_results, write_results, ResultRow, ResultSink};
pub use sim::{SimSettings, Simulation};
