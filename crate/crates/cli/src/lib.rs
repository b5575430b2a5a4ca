//! Driver for the `helmpv` command: configuration, runs, sweeps and the
//! CSV/JSON artifacts they produce.

pub mod config;
pub mod manifest;
pub mod output;
pub mod run;

pub use config::{CompareMode, ConfigError, RunConfig};
pub use manifest::{RunManifest, RunStatus, SweepManifest};
pub use run::{cmd_solve, cmd_sweep, cmd_trace, list_problems, self_test, solve_problem, CliError, SweepParam};
