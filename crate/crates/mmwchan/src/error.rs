use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the measurement-processing pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in `{path}` at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error at {locus}: field `{field}`: {message}")]
    Validation {
        locus: String,
        field: &'static str,
        message: String,
    },

    #[error("undefined moment: profile has no bin above zero")]
    UndefinedMoment,

    #[error("no samples in class {0}")]
    EmptyClass(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mixed bin widths: {0} ns vs {1} ns")]
    MixedBinWidths(f64, f64),

    #[error("empty pairing: no angle/path matches to synthesize from")]
    EmptyPairing,

    #[error("missing k=1 baseline for mode {0}")]
    MissingBaseline(String),

    #[error("internal numerical error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn validation(
        locus: impl Into<String>,
        field: &'static str,
        message: impl Into<String>,
    ) -> Self {
        Error::Validation {
            locus: locus.into(),
            field,
            message: message.into(),
        }
    }
}
