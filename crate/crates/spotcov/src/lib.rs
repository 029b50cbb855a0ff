//! Configuration, CSV formats, a thread-pool executor and the subcommands of
//! the `spotcov` command-line tool. The numerical work lives in
//! [`spotcov_core`].

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod io;

pub use config::Config;
pub use error::{CliError, CliResult};
pub use exec::Parallel;
