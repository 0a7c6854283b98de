use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("coefficient has non-holomorphic parts; plain derivative undefined")]
    NonHolomorphic,
    #[error("weight mismatch: expected {expected}, found {found}")]
    WeightMismatch { expected: Rational, found: Rational },
    #[error("depth {found} exceeds allowed {allowed}")]
    DepthMismatch { allowed: usize, found: usize },
    #[error("parameters (a, b, c) = ({a}, {b}, {c}) violate ab + (1-a)c = 1")]
    InvalidTriple { a: Rational, b: Rational, c: Rational },
    #[error("{0} is not a root of the eigenvalue polynomial")]
    NotARoot(Rational),
    #[error("no lift exists: {0}")]
    NoLift(String),
    #[error("branch misclassified: {0}")]
    Misclassified(String),
    #[error("degenerate eigen-shift: {0}")]
    Degenerate(String),
    #[error("unsupported weight {0}")]
    UnsupportedWeight(i64),
    #[error("evaluation point must lie in the upper half-plane")]
    InvalidPoint,
    #[error("group element must have determinant 1")]
    InvalidGroupElement,
    #[error("cannot embed a tuple of length {from} into length {to}")]
    EmbedShorter { from: usize, to: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
