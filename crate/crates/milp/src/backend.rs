use std::time::Duration;

use crate::branch_bound::{branch_and_bound, MipLimits, MipResult};
use crate::error::SolverError;
use crate::model::Model;
use crate::simplex::{solve_continuous, LpResult, SimplexOptions};

/// Anything able to solve LPs and MILPs under the contracts of the bundled
/// solver can stand in for it.
pub trait Backend: Sync {
    /// Solves a model without binary variables.
    fn solve_lp(&self, model: &Model) -> Result<LpResult, SolverError>;

    fn solve_mip(&self, model: &Model, limits: &MipLimits) -> Result<MipResult, SolverError>;
}

/// Dense revised simplex plus best-bound branch-and-bound.
#[derive(Debug, Clone, Default)]
pub struct BundledSolver {
    pub simplex: SimplexOptions,
}

impl Backend for BundledSolver {
    fn solve_lp(&self, model: &Model) -> Result<LpResult, SolverError> {
        solve_continuous(model, &self.simplex)
    }

    fn solve_mip(&self, model: &Model, limits: &MipLimits) -> Result<MipResult, SolverError> {
        branch_and_bound(model, limits, &self.simplex)
    }
}

/// Solves a purely continuous model with the bundled simplex.
pub fn solve_lp(model: &Model) -> Result<LpResult, SolverError> {
    BundledSolver::default().solve_lp(model)
}

/// Solves a MILP with the bundled branch-and-bound under a wall-clock limit.
pub fn solve_mip(model: &Model, time_limit: Duration) -> Result<MipResult, SolverError> {
    BundledSolver::default().solve_mip(model, &MipLimits::time(time_limit))
}
