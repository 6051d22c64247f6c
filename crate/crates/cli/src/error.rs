use std::path::Path;

use optigraph::drivers::DriverError;
use optigraph::power::PowerError;
use optigraph::solver::SolverError;
use optigraph::GraphError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input data. `line` is 1-based; 0 means the
    /// problem concerns the file as a whole.
    #[error("{file}:{line}: {field}: {message}")]
    Input {
        file: String,
        line: u64,
        field: String,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl CliError {
    pub fn input(
        file: &Path,
        line: u64,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        CliError::Input {
            file: file.display().to_string(),
            line,
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input { .. } => "input",
            CliError::Io { .. } => "io",
            CliError::Config { .. } => "config",
            CliError::Usage(_) => "usage",
            CliError::Power(_) => "model",
            CliError::Driver(_) => "solve",
            CliError::Solver(_) => "solver",
            CliError::Graph(_) => "graph",
        }
    }

    /// JSON object written to stderr on failure.
    pub fn record(&self) -> Value {
        let mut r = json!({ "error": self.kind(), "message": self.to_string() });
        match self {
            CliError::Input {
                file, line, field, ..
            } => {
                r["file"] = json!(file);
                r["line"] = json!(line);
                r["field"] = json!(field);
            }
            CliError::Io { path, .. } | CliError::Config { path, .. } => r["file"] = json!(path),
            CliError::Driver(DriverError::Context {
                day, layer, index, ..
            }) => {
                r["day"] = json!(day);
                r["layer"] = json!(layer.prefix());
                r["index"] = json!(index);
            }
            _ => {}
        }
        r
    }
}
