//! Std companion to [`spca_core`]: CSV datasets, the reduce → classify →
//! score pipeline, report tables and the `spca` command-line driver.

pub mod cli;
pub mod data;
mod error;
pub mod pipeline;
pub mod report;

pub use error::Error;
pub use spca_core as core;
