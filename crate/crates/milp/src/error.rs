use thiserror::Error;

use crate::model::VarId;

/// Errors raised while building or transforming a [`crate::Model`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("variable `{name}` has inverted bounds [{lower}, {upper}]")]
    InvertedBounds { name: String, lower: f64, upper: f64 },
    #[error("binary variable `{name}` needs bounds within {{0, 1}}, got [{lower}, {upper}]")]
    BinaryBounds { name: String, lower: f64, upper: f64 },
    #[error("unknown variable id {0:?}")]
    UnknownVariable(VarId),
    #[error("constraint `{tag}` lists variable {var:?} more than once")]
    DuplicateTerm { tag: String, var: VarId },
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
    #[error("fixing {value} for `{name}` lies outside [{lower}, {upper}]")]
    FixingOutOfBounds { name: String, value: f64, lower: f64, upper: f64 },
    #[error("fixing {value} for binary `{name}` is not 0 or 1")]
    FixingNotBinary { name: String, value: f64 },
    #[error("assignment covers {got} values but the model has {expected} variables")]
    PartialAssignment { expected: usize, got: usize },
    #[error("assignment value for `{0}` is missing")]
    MissingValue(String),
}

/// Errors raised by the bundled LP/MIP solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("solve_lp needs a purely continuous model; `{0}` is binary (relax the model first)")]
    BinaryInLp(String),
    #[error("simplex hit its iteration limit ({0} pivots)")]
    IterationLimit(usize),
    #[error("basis matrix became singular during refactorization")]
    SingularBasis,
    #[error("MILP relaxation is unbounded")]
    Unbounded,
    #[error("time limit must be positive")]
    InvalidTimeLimit,
    #[error(transparent)]
    Model(#[from] ModelError),
}
