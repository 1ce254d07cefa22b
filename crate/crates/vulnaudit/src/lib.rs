//! File formats, parallel fingerprinting, report rendering and the
//! `vulnaudit` command line on top of `vulnaudit-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod ledger_csv;
pub mod parallel;
pub mod pipeline;
pub mod predictions;
pub mod report;

pub use error::{Error, Result};
pub use vulnaudit_core as core;
