//! Experiment driver for the `faddeev-core` detectors: run configurations,
//! a content-addressed operator cache, parallel deterministic scans and
//! CSV/JSON artifacts.

pub mod cache;
pub mod cli;
pub mod config;
pub mod container;
pub mod error;
pub mod output;
pub mod runner;
pub mod validate;

pub use config::RunConfig;
pub use error::{EpError, EpResult};
pub use runner::{run, RunManifest};
