use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("requested order {requested} exceeds max order {max}")]
    OrderTooHigh { requested: usize, max: usize },
    #[error("non-finite value at y = {y}")]
    NonFinite { y: f64 },
    #[error("panel budget exceeded after {panels} panels (partial value {partial})")]
    BudgetExceeded { panels: usize, partial: Complex64 },
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("table size {0} exceeds the limit of 60")]
    Sizing(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
