//! Scenario runner: configure a functional, an initial value and a solver,
//! then emit trajectories and invariant reports.

pub mod checks;
pub mod config;
pub mod convert;
pub mod exit;
pub mod io;
pub mod run;
pub mod study;

pub use exit::{CliError, Outcome};
