use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Where in an input document a problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line of a TSV document.
    Line(usize),
    /// 0-based entry of the `tests` array of a JSON document.
    Entry(usize),
    /// Syntax error reported by the JSON reader.
    Json { line: usize, column: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(l) => write!(f, "line {l}"),
            Location::Entry(e) => write!(f, "tests[{e}]"),
            Location::Json { line, column } => write!(f, "line {line}, column {column}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{location}: {message}")]
    Parse { location: Location, message: String },

    #[error("fault f{fault} undetected")]
    UndetectedFault { fault: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid group map: {0}")]
    InvalidGroups(String),

    #[error("test universe mismatch: {0}")]
    UniverseMismatch(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty sample")]
    EmptySample,

    #[error("sample contains NaN")]
    NanSample,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(location: Location, message: impl Into<String>) -> Self {
        Error::Parse {
            location,
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a broken invariant.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }
}
