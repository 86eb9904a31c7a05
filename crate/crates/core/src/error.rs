use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("outside ℂ⌊e^{{[0,∞)}}⌋: exponent {0} is negative")]
    NegativeExponent(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("point not in polytope: {0}")]
    NotInPolytope(String),
    #[error("not a vertex: {0}")]
    NotAVertex(String),
    #[error("malformed subdivision: {0}")]
    MalformedSubdivision(String),
    #[error("invalid subdivision: {0}")]
    InvalidSubdivision(String),
    #[error("tropical part leaves target polytope: {0}")]
    TropicalImage(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("empty fiber")]
    EmptyFiber,
    #[error("invalid nerve: {0}")]
    InvalidNerve(String),
    #[error("disconnected curve")]
    Disconnected,
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("size bound exceeded: {0}")]
    TooLarge(String),
    #[error("non-generic point configuration, perturb points: {0}")]
    NonGeneric(String),
    #[error("invalid counting problem: {0}")]
    InvalidProblem(String),
    #[error("not a trivalent planar star: {0}")]
    NotTrivalent(String),
    #[error("invalid polytope complex: {0}")]
    InvalidComplex(String),
    #[error("cut system inconsistent: {0}")]
    CutSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
