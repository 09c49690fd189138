use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },

    #[error("value {value} lies outside the domain {domain} of `{function}`")]
    DomainViolation {
        function: String,
        value: f64,
        domain: String,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} exceeds {limit:e})")]
    NotHermitian { asymmetry: f64, limit: f64 },

    #[error("division by zero while computing {0}")]
    DivisionByZero(String),

    #[error("degenerate interval: m = {m} must be strictly below M = {upper}")]
    DegenerateInterval { m: f64, upper: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("unknown map kind `{0}`")]
    UnknownKind(String),

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("unknown relaxation `{0}`")]
    UnknownRelaxation(String),

    #[error("gave up after {attempts} attempts: {what}")]
    ExhaustedRetries { attempts: usize, what: String },

    #[error("{theorem}: hypothesis violated: {condition}")]
    HypothesisViolation { theorem: String, condition: String },

    #[error("{theorem}: expected {expected}, found {found}")]
    ShapeMismatch {
        theorem: String,
        expected: String,
        found: String,
    },

    #[error("{theorem}: function `{function}` lacks the required class {required}")]
    ClassMismatch {
        theorem: String,
        function: String,
        required: String,
    },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
