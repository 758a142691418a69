use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown faculty `{0}`")]
    UnknownFaculty(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("unknown user `{0}`")]
    UnknownUser(String),

    #[error("user `{0}` has no recorded visits")]
    ZeroVisits(String),

    #[error("attribute sets differ: only in usage {only_usage:?}, only in catalog {only_catalog:?}")]
    AttributeMismatch {
        only_usage: Vec<String>,
        only_catalog: Vec<String>,
    },

    #[error("invalid {kind} identifier `{id}`: must be non-empty and match [A-Za-z0-9_-]+")]
    InvalidId { kind: &'static str, id: String },

    #[error("duplicate {kind} identifier `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("requested list length must be at least 1")]
    ZeroLength,

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("no user has at least two distinct visited faculties")]
    NothingToEvaluate,

    #[error("evaluation needs the raw visit log (visit_log.csv)")]
    MissingVisitLog,

    /// Malformed syntax: bad number, wrong column count, bad header.
    #[error("{}:{line}:{column}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    /// Well-formed file whose content contradicts the rest of the data.
    #[error("{}:{line}: {source}", file.display())]
    Invalid {
        file: PathBuf,
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("storage error on {}: {source}", path.display())]
    Storage {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn storage(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Storage {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable name, used as the `error` field of API bodies.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownFaculty(_) => "UnknownFaculty",
            Error::UnknownAttribute(_) => "UnknownAttribute",
            Error::UnknownUser(_) => "UnknownUser",
            Error::ZeroVisits(_) => "ZeroVisits",
            Error::AttributeMismatch { .. } => "AttributeMismatch",
            Error::InvalidId { .. } => "InvalidId",
            Error::DuplicateId { .. } => "DuplicateId",
            Error::ZeroLength => "ZeroLength",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::NothingToEvaluate => "NothingToEvaluate",
            Error::MissingVisitLog => "MissingVisitLog",
            Error::Parse { .. } => "ParseError",
            Error::Invalid { .. } => "ValidationError",
            Error::Storage { .. } => "StorageError",
        }
    }

    /// Strips file/line wrappers down to the domain error underneath.
    pub fn root(&self) -> &Error {
        match self {
            Error::Invalid { source, .. } => source.root(),
            other => other,
        }
    }
}

pub(crate) fn check_id(kind: &'static str, id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-');
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidId {
            kind,
            id: id.to_string(),
        })
    }
}
