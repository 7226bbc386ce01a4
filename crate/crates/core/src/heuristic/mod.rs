//! LP-guided probabilistic fixing of facility openings combined with an
//! exact very-large-neighborhood search.

mod attractiveness;
mod driver;
mod fos;
mod params;
mod search;

pub use attractiveness::{
    attractiveness_init, fixing_probabilities, ogap, posterior_attractiveness, relaxation_value, tau_update,
    AttractivenessTable, EPS_TAU,
};
pub use driver::{check_attainable, run, RunResult, RunStatus, TraceEntry};
pub use fos::{build_fos, build_fos_partial, is_complete, sample_index, Fos};
pub use params::HeuristicParams;
pub use search::{check_and_repair, fos_center, solution_center, vlns, Center, OutcomeStatus, SolveOutcome, VlnsMode};
