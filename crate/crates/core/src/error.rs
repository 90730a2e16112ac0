use thiserror::Error;

use crate::scenario::{Agent, ValidityReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid bounds on variable {index}: [{lower}, {upper}]")]
    InvalidBounds {
        index: usize,
        lower: f64,
        upper: f64,
    },
    #[error("objective, matrix and right-hand side entries must be finite")]
    NonFinite,
    #[error("simplex iteration limit of {limit} exceeded")]
    IterationLimit { limit: usize },
    #[error("basis matrix became numerically singular")]
    SingularBasis,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid scenario:\n{0}")]
    Invalid(Box<ValidityReport>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispatchError {
    #[error("load shift {delta} outside [0, {max}]")]
    ShiftOutOfRange { delta: f64, max: f64 },
    #[error("economic dispatch infeasible: {binding}")]
    Infeasible { binding: String },
    #[error("economic dispatch unbounded")]
    Unbounded,
    #[error("price {lambda} at bus {bus} does not match 0, c1 or c2")]
    UnmappedLmp { bus: usize, lambda: f64 },
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("scenario outside the analysed setting:\n{0}")]
    InvalidScenario(Box<ValidityReport>),
    #[error("weighted rate at bus 2 is zero for the {0} agent; threshold ratio undefined")]
    DegenerateWeights(Agent),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid scenario:\n{0}")]
    Invalid(Box<ValidityReport>),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}
