//! File formats, parallel drivers and the command-line front end for `binae`.

pub mod checkpoint;
pub mod codebook_io;
pub mod commands;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod manifest;
pub mod report;
pub mod run;

pub use error::{CliError, Result};
