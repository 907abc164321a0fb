//! Front end of `diffk-core`: geometry config files, run configurations,
//! line-delimited reports and the acceptance suite.
//!
//! The `diffk` binary wraps [`run::run`]; the exit status is 0 when every
//! check passes, 1 when a check fails and 2 on configuration errors.

pub mod commands;
pub mod geometry_config;
pub mod report;
pub mod run;
pub mod suite;

use std::path::Path;

pub use geometry_config::{load_geometry, load_geometry_file};
pub use report::{Record, Relation, Report};
pub use run::{run, Command, RunConfig};

/// Environment variable holding the default catalog resolution.
pub const RESOLUTION_ENV: &str = "DIFFK_RESOLUTION";

/// Configuration and I/O errors. Numerical failures are not errors: they
/// are failing records in a [`Report`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("field `{path}`: {message}")]
    Field { path: String, message: String },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Core(#[from] diffk_core::Error),
    #[error("{file}: {source}")]
    InFile { file: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn in_file(self, path: &Path) -> Self {
        Self::InFile { file: path.display().to_string(), source: Box::new(self) }
    }

    /// The error inside any file context.
    pub fn root(&self) -> &Self {
        match self {
            Self::InFile { source, .. } => source.root(),
            e => e,
        }
    }
}
