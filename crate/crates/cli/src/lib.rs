//! Experiment harness for incomplete U-statistic risk estimation: synthetic
//! data generation, Ward hierarchical clustering, the three experiment
//! pipelines (one-time sampling, SGD strategy comparison, clustering model
//! selection), and the report plumbing behind the `ustat` binary.
//!
//! Every pipeline takes an explicit seed, runs trials on split child
//! streams, and writes CSV reports that embed the full resolved
//! configuration; reruns with the same configuration are byte-identical.

pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod experiments;
pub mod metric_opt;
pub mod report;
pub mod schedule;
pub mod ward;

pub use error::{CliError, CliResult};
