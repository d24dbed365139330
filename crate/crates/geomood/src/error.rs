//! Crate-wide error type and process exit-code mapping.

use std::path::PathBuf;
use thiserror::Error;

/// Everything that can go wrong across ingest, analysis, and reporting.
#[derive(Debug, Error)]
pub enum Error {
    /// Filesystem trouble while reading or writing a concrete path.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A specific line of an input file failed validation.
    #[error("{path}:{line}: {reason}")]
    MalformedLine {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    /// Input that is structurally broken beyond a single line.
    #[error("invalid input{}: {reason}", path_suffix(.path))]
    InvalidInput {
        path: Option<PathBuf>,
        reason: String,
    },

    /// The same tract identifier appeared more than once in a boundary file.
    #[error("duplicate tract id {tract_id:?}")]
    DuplicateTract { tract_id: String },

    /// An operation that needs data received none.
    #[error("empty input: {what}")]
    EmptyInput { what: String },

    /// A point set crosses the antimeridian; degree-space means are invalid there.
    #[error("point set for {who} spans more than 180 degrees of longitude")]
    AntimeridianSpan { who: String },

    /// A statistic is undefined because one input has zero variance.
    #[error("{what} is constant; statistic undefined")]
    ConstantInput { what: String },

    /// Not enough observations for the requested statistic.
    #[error("{what}: need at least {needed}, got {got}")]
    InsufficientData {
        what: String,
        needed: usize,
        got: usize,
    },

    /// The user asked about a tract that has no data.
    #[error("no messages for tract {tract_id:?}")]
    UnknownTract { tract_id: String },

    /// A metric/cohort/field name not present in the registry.
    #[error("unknown {kind} {name:?} (expected one of {expected})")]
    UnknownName {
        kind: &'static str,
        name: String,
        expected: String,
    },

    /// Bad configuration file or flag combination.
    #[error("configuration error: {reason}")]
    Config { reason: String },

    /// An internal invariant was violated; indicates a bug, not bad input.
    #[error("internal error: {reason}")]
    Internal { reason: String },
}

fn path_suffix(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!(" ({})", p.display()),
        None => String::new(),
    }
}

impl Error {
    /// Process exit code: 1 for input/usage errors, 2 for internal faults.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Internal { .. } => 2,
            _ => 1,
        }
    }

    /// Wraps an I/O failure with the path it happened on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Flags a broken internal invariant (exit code 2).
    pub fn internal(reason: impl Into<String>) -> Self {
        Error::Internal {
            reason: reason.into(),
        }
    }
}
