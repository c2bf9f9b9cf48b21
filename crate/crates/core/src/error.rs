use thiserror::Error;

/// Errors raised while building or manipulating finite algebras.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A frame failed structural validation.
    #[error("malformed frame: {0}")]
    Frame(String),
    /// Two values belong to algebras over different atom sets.
    #[error("frame mismatch: expected {expected} atoms, found {found}")]
    FrameMismatch { expected: usize, found: usize },
    /// Two algebras do not share the required signature.
    #[error("signature mismatch: {0}")]
    Signature(String),
    /// An operator, constant or index is not part of the signature.
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    /// An index lies outside the declared dimension or map domain.
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    /// A term mentions a variable that the assignment does not cover.
    #[error("unassigned variable `{0}`")]
    UnassignedVariable(String),
    /// A parameter lies outside the supported range.
    #[error("parameter out of range: {0}")]
    Parameter(String),
    /// An exhaustive computation would exceed its configured cap.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    /// Text could not be parsed.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// A precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// JSON (de)serialization failed.
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
