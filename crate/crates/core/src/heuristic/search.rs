use std::collections::BTreeMap;

use confl_milp::{Assignment, Backend, BundledSolver, LinearConstraint, MipLimits, MipStatus, Model, Sense, VarId};
use serde::Serialize;

use crate::error::HeuristicError;
use crate::formulation::ConflModel;
use crate::instance::{Instance, Technology};

use super::fos::Fos;
use super::params::HeuristicParams;

/// Status of a restricted solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Optimal,
    Feasible,
    Infeasible,
    Timeout,
}

impl From<MipStatus> for OutcomeStatus {
    fn from(s: MipStatus) -> Self {
        match s {
            MipStatus::Optimal => OutcomeStatus::Optimal,
            MipStatus::Feasible => OutcomeStatus::Feasible,
            MipStatus::Infeasible => OutcomeStatus::Infeasible,
            MipStatus::TimeoutNoIncumbent => OutcomeStatus::Timeout,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: OutcomeStatus,
    pub solution: Option<Assignment>,
    /// `+inf` without a solution.
    pub objective: f64,
    /// True when the FOS fixing failed and MIP-VLNS produced the result.
    pub repaired: bool,
}

impl SolveOutcome {
    pub fn has_solution(&self) -> bool {
        self.solution.is_some()
    }

    fn none(status: OutcomeStatus) -> Self {
        SolveOutcome { status, solution: None, objective: f64::INFINITY, repaired: false }
    }
}

/// Center of a VLNS neighborhood: a 0/1 value for some z_f^t.
pub type Center = BTreeMap<(usize, Technology), bool>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VlnsMode {
    Repair,
    /// Only solutions strictly cheaper than this value are accepted.
    Improve { incumbent: f64 },
}

/// z_f^t = 1 for each FOS entry and z_f^s = 0 for the other technologies
/// of the same facility, as a VLNS center.
pub fn fos_center(confl: &ConflModel, fos: &Fos) -> Center {
    let mut center = Center::new();
    for (f, t) in fos.entries() {
        for &s in &confl.techs {
            center.insert((f, s), s == t);
        }
    }
    center
}

/// Center made of every z coordinate of a full solution.
pub fn solution_center(confl: &ConflModel, x: &Assignment) -> Center {
    confl.z.iter().map(|(&k, &id)| (k, x.get(id) > 0.5)).collect()
}

fn solve(model: &Model, limits: &MipLimits) -> Result<SolveOutcome, HeuristicError> {
    let r = BundledSolver::default().solve_mip(model, limits)?;
    Ok(SolveOutcome {
        status: r.status.into(),
        objective: r.objective,
        solution: r.incumbent,
        repaired: false,
    })
}

/// Solves the model with the FOS fixed; on a proven infeasibility or a
/// limit hit without incumbent, searches the Hamming ball around the FOS.
pub fn check_and_repair(
    instance: &Instance,
    confl: &ConflModel,
    fos: &Fos,
    params: &HeuristicParams,
) -> Result<SolveOutcome, HeuristicError> {
    let center = fos_center(confl, fos);
    let fixings: BTreeMap<VarId, f64> = center
        .iter()
        .map(|(&(f, t), &on)| (confl.z_var(f, t), if on { 1.0 } else { 0.0 }))
        .collect();
    let checked = solve(&confl.model.apply_fixings(&fixings)?, &params.subproblem_limits())?;
    if checked.has_solution() {
        return Ok(checked);
    }
    log::debug!("FOS check ended {:?}, repairing", checked.status);
    let mut repaired = vlns(instance, confl, &center, params, VlnsMode::Repair)?;
    repaired.repaired = true;
    Ok(repaired)
}

/// Exact search over solutions whose z differs from `center` in at most
/// n of the centered coordinates.
pub fn vlns(
    instance: &Instance,
    confl: &ConflModel,
    center: &Center,
    params: &HeuristicParams,
    mode: VlnsMode,
) -> Result<SolveOutcome, HeuristicError> {
    let radius = params.radius(instance.facilities.len());
    let mut model = confl.model.clone();
    let mut ones = 0.0;
    let terms = center
        .iter()
        .map(|(&(f, t), &on)| {
            if on {
                ones += 1.0;
            }
            (confl.z_var(f, t), if on { -1.0 } else { 1.0 })
        })
        .collect();
    model.add_constraint(LinearConstraint::new("HAMMING", terms, Sense::Le, radius as f64 - ones))?;
    if let VlnsMode::Improve { incumbent } = mode {
        let cutoff = incumbent - 1e-6 * incumbent.abs().max(1.0);
        model.add_constraint(LinearConstraint::new("CUTOFF", model.objective_terms().collect(), Sense::Le, cutoff))?;
    }
    let limits = params.vlns_limits();
    let out = solve(&model, &limits)?;
    if let VlnsMode::Improve { incumbent } = mode {
        // The cutoff row is only met within the feasibility tolerance.
        if out.has_solution() && out.objective >= incumbent {
            return Ok(SolveOutcome::none(OutcomeStatus::Infeasible));
        }
    }
    Ok(out)
}
