//! Command-line driver for `slfd-core`: configuration files, the solve,
//! bounds, oracle and validate commands, table and CSV output, and the
//! Galerkin reference solver used for cross-checks.

pub mod bounds;
pub mod config;
pub mod error;
pub mod golden;
pub mod oracle;
pub mod problem;
pub mod report;
pub mod validate;

pub use crate::config::ProblemConfig;
pub use crate::error::{CliError, CliResult};
pub use crate::problem::{IndexReport, Problem, RankRow};
