use thiserror::Error;

/// Errors raised by the algebra, the state types and the expression front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("universe error: {0}")]
    Universe(String),
    #[error("sector error: {0}")]
    Sector(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("element has nonzero body {0}; split off the scalar part first")]
    Body(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("split error: {0}")]
    Split(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("{line}:{column}: {message}; expected one of: {}", expected.join(", "))]
    Parse {
        line: usize,
        column: usize,
        message: String,
        expected: Vec<String>,
    },
    #[error("arity error: {0}")]
    Arity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    /// Machine-readable error name, used in CLI JSON output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Universe(_) => "UniverseError",
            Error::Sector(_) => "SectorError",
            Error::Parity(_) => "ParityError",
            Error::Body(_) => "BodyError",
            Error::NotInvertible(_) => "NotInvertibleError",
            Error::Shape(_) => "ShapeError",
            Error::Index(_) => "IndexError",
            Error::Split(_) => "SplitError",
            Error::Range(_) => "RangeError",
            Error::Parse { .. } => "ParseError",
            Error::Arity(_) => "ArityError",
            Error::Domain(_) => "DomainError",
            Error::Serde(_) => "SerializationError",
        }
    }

    /// True for errors that come from reading the input text rather than
    /// from evaluating a measure.
    pub fn is_syntax(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Arity(_) | Error::Serde(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
