//! Solver-agnostic MILP model plus a bundled reference solver.
//!
//! The [`Model`] type is a small intermediate representation with binary and
//! continuous variables, linear rows and a minimization objective. Models can
//! be relaxed, overlaid with variable fixings, evaluated against an
//! [`Assignment`] and exported in LP text format for external solvers.
//!
//! The bundled solver is a dense bounded-variable revised simplex
//! ([`solve_lp`]) and a best-bound branch-and-bound on top of it
//! ([`solve_mip`]). Both are sized for desk-scale models; anything larger
//! should go through [`export_lp_text`] and an external solver.

mod backend;
mod branch_bound;
mod error;
mod lp_format;
mod model;
mod simplex;

pub use backend::{solve_lp, solve_mip, Backend, BundledSolver};
pub use branch_bound::{MipLimits, MipResult, MipStatus};
pub use error::{ModelError, SolverError};
pub use lp_format::export_lp_text;
pub use model::{
    Assignment, ConstraintId, Evaluation, LinearConstraint, Model, Sense, VarId, VarKind,
    Variable, Violation,
};
pub use simplex::{LpResult, LpStatus, SimplexOptions};

/// Feasibility tolerance used by the solver and by solution checks.
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// Distance from {0, 1} under which a binary counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
