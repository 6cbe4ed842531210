//! Chart files, JSON reports, floating-point oracles and the command line for
//! [`fedosov_core`].

#![allow(clippy::needless_range_loop)]

pub mod chartfile;
pub mod cli;
pub mod error;
pub mod expr;
pub mod json;
pub mod oracle;
pub mod selftest;

pub use chartfile::{parse_chart, parse_chart_with_order, ChartFile, Connection};
pub use error::CliError;
