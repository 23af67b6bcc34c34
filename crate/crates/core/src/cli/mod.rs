//! Command-line front end: configuration, dispatch and artifact writing.

pub mod config;
mod output;
mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{parse_config, Command, RangeSpec, RunConfig, SweepSpec, Tolerances};
pub use output::{format_number, CsvTable};
pub use run::{execute, resolve_threads, RunSummary, THREADS_ENV};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_name}:{line}:{column}: parse error: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {command}: {source}")]
    Compute {
        context: String,
        command: Command,
        #[source]
        source: crate::Error,
    },
}

impl CliError {
    /// Single-line diagnostic.
    pub fn diagnostic(&self) -> String {
        self.to_string().replace('\n', " ")
    }
}
