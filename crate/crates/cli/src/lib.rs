//! Library half of the `snwit` command-line tool. Every subcommand writes
//! to a caller-supplied sink so it can be exercised without a process.

use std::path::PathBuf;

use thiserror::Error;

pub mod commands;
pub mod ensemble;
pub mod io;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] snwit_core::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn context(self, context: impl Into<String>) -> Self {
        Self::Context { context: context.into(), source: Box::new(self) }
    }

    /// Every failure maps to 2; a verdict is data, not an error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
