use confl_milp::{ModelError, SolverError};
use thiserror::Error;

use crate::instance::Technology;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("invalid instance at `{path}`: {message}")]
    Invalid { path: String, message: String },
    #[error("instance has no wireless parameters")]
    MissingWireless,
    #[error("malformed instance document at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("generator could not make every coverage threshold attainable after {attempts} attempts ({technology})")]
    Unattainable { technology: Technology, attempts: usize },
    #[error("invalid generator parameters: {0}")]
    Params(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeuristicError {
    #[error("no admissible candidate left while the opening state is still partial for {technology}")]
    NoCompletableFos { technology: Technology },
    #[error("facility {facility} cannot be opened on {new} because it is already open on {existing}")]
    Clash {
        facility: usize,
        existing: Technology,
        new: Technology,
    },
    #[error("empty candidate list")]
    EmptyCandidates,
    #[error("OGap needs a positive solution value, got {0}")]
    NonPositiveValue(f64),
    #[error("lower bound {bound} exceeds solution value {value}")]
    BoundInconsistency { value: f64, bound: f64 },
    #[error("the linear relaxation of the strengthened model is infeasible")]
    RootInfeasible,
    #[error("invalid heuristic parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl From<ModelError> for HeuristicError {
    fn from(e: ModelError) -> Self {
        HeuristicError::Build(BuildError::Model(e))
    }
}

impl From<InstanceError> for HeuristicError {
    fn from(e: InstanceError) -> Self {
        HeuristicError::Build(BuildError::Instance(e))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("instance `{id}` has a nonpositive reference gap ({gap})")]
    NonPositiveReference { id: String, gap: f64 },
    #[error("instance `{0}` lacks a {1} solution")]
    MissingSide(String, &'static str),
    #[error("malformed solution document at `{path}`: {message}")]
    Schema { path: String, message: String },
}
