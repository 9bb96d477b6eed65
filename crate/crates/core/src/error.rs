use thiserror::Error;

/// Errors raised by the numerical and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("fixed-point iteration did not converge at s = {s} after {iterations} iterations")]
    NoConvergence { s: f64, iterations: usize },

    #[error("parameters are not subcritical (gamma = {gamma}, d = {d})")]
    NotSubcritical { gamma: f64, d: u32 },

    #[error("enumeration budget exceeded: {work} > {budget}")]
    BudgetExceeded { work: f64, budget: f64 },

    #[error("site {0:?} lies outside the simulation box")]
    OutsideBox(Vec<i64>),

    #[error("lattice has {0} sites, exact oracle supports at most 5")]
    LatticeTooLarge(usize),

    #[error("trajectory left the simplex at t = {time}: ({u1}, {u2})")]
    SimplexViolation { time: f64, u1: f64, u2: f64 },

    #[error("{0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
