use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not an element of {1}")]
    NotInRing(String, &'static str),
    #[error("{0} is not divisible by {1}")]
    NotDivisible(String, String),
    #[error("{0} is not a unit")]
    NotUnit(String),
    #[error("unsupported ring: {0}")]
    UnsupportedRing(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("not a chain complex: boundary squares to nonzero in degree {0}")]
    NotAComplex(i64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("Poincaré required: {0}")]
    PoincareRequired(String),
}

pub type Result<T> = std::result::Result<T, Error>;
