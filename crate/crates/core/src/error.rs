use thiserror::Error;

use crate::graded::Basis;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("basis element {0} does not exist in the module")]
    UnknownBasis(Basis),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("entry {inputs:?} -> {output} violates homogeneity for a map of degree {degree}")]
    NotHomogeneous { inputs: Vec<Basis>, output: Basis, degree: i32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("insertion position {position} out of range 1..={arity}")]
    PositionOutOfRange { position: usize, arity: usize },
    #[error("invalid retract: {0}")]
    InvalidRetract(String),
    #[error("differential does not square to zero")]
    NotAComplex,
    #[error("truncation mismatch: {0}")]
    Truncation(String),
    #[error("input fails the A-infinity relations at arity {0}")]
    NotAInfinity(usize),
    #[error("nilpotency violated at homogeneity {0}")]
    Nilpotency(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
