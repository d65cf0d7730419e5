//! Config-driven front end for the `netfilter` command: evaluation, grid
//! scans, threshold bisection, filter optimization, the Born-rule cross-check
//! and the named reproduction suite.

// Negated comparisons double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod paths;
pub mod reproduce;

pub use error::{CliError, CliResult};
