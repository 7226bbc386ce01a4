use std::collections::BTreeMap;

use confl_milp::{solve_lp, LpStatus, SolverError};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::HeuristicError;
use crate::formulation::ConflModel;
use crate::instance::Technology;

use super::fos::Fos;

/// Floor for every attractiveness value.
pub const EPS_TAU: f64 = 1e-9;

/// Relaxation values at or below this are treated as zero.
const TINY: f64 = 1e-12;

/// Optimality gap (v − L)/v of a solution of value v against bound L.
pub fn ogap(v: f64, lower: f64) -> Result<f64, HeuristicError> {
    if !(v > 0.0) {
        return Err(HeuristicError::NonPositiveValue(v));
    }
    // Bounds computed by the simplex may overshoot v by rounding noise.
    if lower > v + 1e-9 * v.max(1.0) {
        return Err(HeuristicError::BoundInconsistency { value: v, bound: lower });
    }
    Ok(((v - lower) / v).max(0.0))
}

/// Sampling distribution p_k ∝ α τ_k + (1 − α) η_k.
pub fn fixing_probabilities(tau: &[f64], eta: &[f64], alpha: f64) -> Result<Vec<f64>, HeuristicError> {
    if tau.is_empty() {
        return Err(HeuristicError::EmptyCandidates);
    }
    assert_eq!(tau.len(), eta.len(), "one τ and one η per candidate");
    let mix: Vec<f64> = tau
        .iter()
        .zip(eta)
        .map(|(t, e)| alpha * t + (1.0 - alpha) * e)
        .collect();
    let total: f64 = mix.iter().sum();
    if !(total > 0.0) {
        return Ok(vec![1.0 / mix.len() as f64; mix.len()]);
    }
    Ok(mix.into_iter().map(|m| m / total).collect())
}

/// A-priori attractiveness τ per (facility, technology).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractivenessTable {
    initial: BTreeMap<(usize, Technology), f64>,
    current: BTreeMap<(usize, Technology), f64>,
    /// Number of updates applied so far (h).
    pub iteration: usize,
    /// Value of the unfixed strengthened relaxation.
    pub root_bound: f64,
}

impl AttractivenessTable {
    pub fn from_values(root_bound: f64, values: BTreeMap<(usize, Technology), f64>) -> Self {
        let values: BTreeMap<_, _> = values.into_iter().map(|(k, v)| (k, v.max(EPS_TAU))).collect();
        AttractivenessTable {
            initial: values.clone(),
            current: values,
            iteration: 0,
            root_bound,
        }
    }

    pub fn get(&self, f: usize, t: Technology) -> f64 {
        self.current.get(&(f, t)).copied().unwrap_or(EPS_TAU)
    }

    pub fn initial(&self, f: usize, t: Technology) -> f64 {
        self.initial.get(&(f, t)).copied().unwrap_or(EPS_TAU)
    }

    pub fn values(&self) -> &BTreeMap<(usize, Technology), f64> {
        &self.current
    }
}

/// Relaxation value with z_f^t = 1 for every listed pair; `None` if infeasible.
pub fn relaxation_value(confl: &ConflModel, open: &[(usize, Technology)]) -> Result<Option<f64>, HeuristicError> {
    let fixings = open.iter().map(|&(f, t)| (confl.z_var(f, t), 1.0)).collect();
    let lp = confl.model.lp_relaxation().apply_fixings(&fixings)?;
    let r = solve_lp(&lp)?;
    match r.status {
        LpStatus::Optimal => Ok(Some(r.objective)),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(SolverError::Unbounded.into()),
    }
}

/// L_root / LP, floored at [`EPS_TAU`]; 1 when both are zero.
fn inverted(root_bound: f64, value: Option<f64>) -> f64 {
    match value {
        None => EPS_TAU,
        Some(v) if v <= TINY => 1.0,
        Some(v) => (root_bound / v).max(EPS_TAU),
    }
}

/// Initial τ from the strengthened relaxation with each z_f^t fixed to 1 in turn.
pub fn attractiveness_init(strong: &ConflModel) -> Result<AttractivenessTable, HeuristicError> {
    let root = relaxation_value(strong, &[])?.ok_or(HeuristicError::RootInfeasible)?;
    let keys: Vec<(usize, Technology)> = strong.z.keys().copied().collect();
    let values = keys
        .par_iter()
        .map(|&key| relaxation_value(strong, &[key]).map(|v| (key, inverted(root, v))))
        .collect::<Result<BTreeMap<_, _>, _>>()?;
    log::debug!("root relaxation {root}, {} attractiveness values", values.len());
    Ok(AttractivenessTable::from_values(root, values))
}

/// η of `candidate` given the current FOS, from the plain relaxation.
pub fn posterior_attractiveness(
    plain: &ConflModel,
    root_bound: f64,
    fos: &Fos,
    candidate: (usize, Technology),
) -> Result<f64, HeuristicError> {
    let mut open: Vec<_> = fos.entries().collect();
    open.push(candidate);
    Ok(inverted(root_bound, relaxation_value(plain, &open)?))
}

/// One update of τ from the solutions of the last inner loop.
///
/// `samples` pairs each FOS with the value of the solution built from it;
/// only the pairs of that FOS receive its reward or penalty. Returns false
/// and leaves the table untouched when OGap(v̄) is zero.
pub fn tau_update(
    table: &mut AttractivenessTable,
    samples: &[(Fos, f64)],
    v_bar: f64,
    lower: f64,
) -> Result<bool, HeuristicError> {
    let base = ogap(v_bar, lower)?;
    if base == 0.0 {
        return Ok(false);
    }
    let mut delta: BTreeMap<(usize, Technology), f64> = BTreeMap::new();
    for (fos, v) in samples {
        let g = ogap(*v, lower)?;
        for (f, t) in fos.entries() {
            *delta.entry((f, t)).or_default() += table.initial(f, t) * (base - g) / base;
        }
    }
    for (key, d) in delta {
        let entry = table.current.entry(key).or_insert(EPS_TAU);
        *entry = (*entry + d).max(EPS_TAU);
    }
    table.iteration += 1;
    Ok(true)
}
