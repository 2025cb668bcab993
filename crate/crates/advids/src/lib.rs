//! File formats, CSV ingestion and the `advids` command line on top of
//! `advids-core`.

pub mod cli;
pub mod csv_io;
mod error;
pub mod manifest;
pub mod model_io;
pub mod report;
pub mod run;

pub use error::{AppError, Result};
