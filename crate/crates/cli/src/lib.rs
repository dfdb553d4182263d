//! Config-driven runs of the `eosvac-core` signal engine.
//!
//! Reads a TOML run description, evaluates the configured geometries on a
//! rayon pool and writes CSV tables with a JSON sidecar.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;
pub mod runner;

pub use commands::{run, validate, Check, Command};
pub use config::RunConfig;
pub use error::CliError;
pub use ingest::{ingest_index_table, read_index_table};
pub use runner::{evaluate_groups, with_threads, GeometryRun, Group, Session};
