//! Sampling pipelines, statistics and file formats on top of `irs-core`.

pub mod config;
pub mod error;
pub mod harness;
pub mod io;
pub mod pipeline;
pub mod selftest;
pub mod stats;
pub mod svg;

pub use error::PipelineError;
