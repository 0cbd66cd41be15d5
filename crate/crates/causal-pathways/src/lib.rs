//! File formats, configuration and the command-line pipeline on top of
//! `causal-pathways-core`.

pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod graph_file;
pub mod model_file;
pub mod report;
pub mod validation;

pub use error::{AppError, Result};
