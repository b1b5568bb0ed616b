use thiserror::Error;

use crate::triangle::NodeIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed rational `{0}`")]
    MalformedRational(String),
    #[error("expression error: {0}")]
    Expression(String),
    #[error("multiplicity {side}({n},{k}) = {value} is not strictly positive")]
    NonPositiveMultiplicity {
        side: &'static str,
        n: usize,
        k: usize,
        value: String,
    },
    #[error("unknown triangle `{0}`")]
    UnknownTriangle(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("node ({}, {}) is outside the triangle", .0.n, .0.k)]
    NodeOutOfRange(NodeIndex),
    #[error("boundary point `{point}` is not admissible for `{triangle}`")]
    IncompatiblePoint { triangle: String, point: String },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("kernel is not harmonic: {0}")]
    NotHarmonic(String),
    #[error("weights sum to {0}, expected 1")]
    WeightSum(String),
    #[error("empty atom set")]
    EmptyAtoms,
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
