use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid orientation character: {0}")]
    Orientation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("generator `{0}` has no assigned value in the representation")]
    Unassigned(String),

    #[error("matrix is not invertible over the integers")]
    NotUnimodular,

    #[error("invalid Klein-bottle automorphism: {0}")]
    InvalidKbAut(String),

    #[error("element x^{0} y^{1} is not central in the Klein-bottle group")]
    NotCentral(i64, i64),

    #[error("unsupported base: {0}")]
    UnsupportedBase(String),

    #[error("malformed spec: {0}")]
    MalformedSpec(String),

    #[error("complex check failed: {0}")]
    NotAComplex(String),
}
