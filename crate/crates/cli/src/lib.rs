//! Case files, configuration and subcommands behind the `optigraph` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
