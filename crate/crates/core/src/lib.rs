//! Connected facility location with fiber, copper and wireless access:
//! instance data, MILP formulations, valid inequalities, a solution checker
//! and an LP-guided fixing heuristic.

pub mod error;
pub mod formulation;
pub mod heuristic;
pub mod inequalities;
pub mod instance;
pub mod io;
pub mod verify;

#[cfg(test)]
mod testutil;

pub use error::{BuildError, HeuristicError, InstanceError, ReportError};
pub use formulation::{big_m, build_2confl, build_3confl, ConflModel, NetArc, NetNode, Variant};
pub use inequalities::{conflict_pairs, strengthen, superinterferers, ConflictPair};
pub use instance::{Instance, Technology};
pub use verify::{verify_solution, VerificationReport};
