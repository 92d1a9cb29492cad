//! File formats and command-line front end for `evdisagg-core`.
//!
//! * [`csvio`]: `timestamp,power_kw` traces at one sample per minute
//! * [`report`]: JSON reports with fixed six-decimal numbers
//! * [`plot`]: stacked-panel SVG plots
//! * [`cli`]: the `evdisagg` subcommands

pub mod cli;
pub mod csvio;
pub mod error;
pub mod plot;
pub mod report;

pub use error::{CliError, Result};
