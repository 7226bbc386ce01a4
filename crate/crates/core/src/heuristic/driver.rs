use std::time::Instant;

use confl_milp::Assignment;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::HeuristicError;
use crate::formulation::{build_3confl, ConflModel};
use crate::inequalities::strengthen;
use crate::instance::{Instance, Technology};
use crate::verify::verify_solution;

use super::attractiveness::{attractiveness_init, ogap, tau_update};
use super::fos::{build_fos_partial, Fos};
use super::params::HeuristicParams;
use super::search::{check_and_repair, solution_center, vlns, OutcomeStatus, VlnsMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Solved,
    NoSolution,
}

/// One inner-loop step, or the final improvement pass (`inner = None`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub outer: usize,
    pub inner: Option<usize>,
    pub fos: Fos,
    /// Technologies the FOS could not be completed for.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub incomplete: Vec<Technology>,
    pub status: OutcomeStatus,
    pub repaired: bool,
    pub objective: Option<f64>,
    /// Best value known after this step.
    pub incumbent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: RunStatus,
    /// Assignment of the plain three-technology model.
    pub solution: Option<Assignment>,
    pub objective: Option<f64>,
    /// `+inf` when the relaxation proves the instance infeasible.
    pub lower_bound: f64,
    pub gap: Option<f64>,
    pub outer_iterations: usize,
    pub trace: Vec<TraceEntry>,
}

/// Checks that every W_t can be reached: the potential weight of all
/// facilities on technologies 1..=t must cover W_t, as coverage is
/// cumulative over better technologies.
pub fn check_attainable(instance: &Instance) -> Result<(), HeuristicError> {
    let mut reach = 0.0;
    for t in Technology::ALL {
        reach += (0..instance.facilities.len()).map(|f| instance.potential_weight(f, t)).sum::<f64>();
        if reach < instance.threshold(t) {
            return Err(HeuristicError::NoCompletableFos { technology: t });
        }
    }
    Ok(())
}

/// Runs the heuristic: τ initialization, then outer iterations of Σ FOS
/// constructions with check-and-repair and a τ update, then one MIP-VLNS
/// improvement pass around the best solution.
pub fn run(instance: &Instance, params: &HeuristicParams) -> Result<RunResult, HeuristicError> {
    params.validate()?;
    let plain = build_3confl(instance)?;
    check_attainable(instance)?;
    let strong = strengthen(&plain, instance)?;
    run_prepared(instance, &plain, &strong, params)
}

pub(crate) fn run_prepared(
    instance: &Instance,
    plain: &ConflModel,
    strong: &ConflModel,
    params: &HeuristicParams,
) -> Result<RunResult, HeuristicError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut table = match attractiveness_init(strong) {
        Err(HeuristicError::RootInfeasible) => {
            log::info!("strengthened relaxation infeasible: the instance has no solution");
            return Ok(RunResult {
                status: RunStatus::NoSolution,
                solution: None,
                objective: None,
                lower_bound: f64::INFINITY,
                gap: None,
                outer_iterations: 0,
                trace: Vec::new(),
            });
        }
        other => other?,
    };
    let lower = table.root_bound;
    let mut best: Option<(Assignment, f64)> = None;
    let mut trace = Vec::new();
    let mut previous_mean: Option<f64> = None;
    let mut h = 0;

    let keep_going = |h: usize| match params.iterations {
        Some(cap) => h < cap,
        None => {
            let e = start.elapsed();
            e < params.outer_loop_limit && e < params.global_time_limit
        }
    };

    while keep_going(h) {
        h += 1;
        let mut samples: Vec<(Fos, f64)> = Vec::new();
        for sigma in 1..=params.sigma {
            let (fos, incomplete) = build_fos_partial(instance, plain, &table, params, &mut rng)?;
            if !incomplete.is_empty() {
                log::debug!("FOS partial for {incomplete:?}, handing it to check-and-repair");
            }
            let outcome = check_and_repair(instance, plain, &fos, params)?;
            let mut value = None;
            if let Some(x) = &outcome.solution {
                if accept(instance, plain, x) {
                    value = Some(outcome.objective);
                    samples.push((fos.clone(), outcome.objective));
                    if best.as_ref().map_or(true, |(_, v)| outcome.objective < *v) {
                        best = Some((x.clone(), outcome.objective));
                    }
                }
            }
            trace.push(TraceEntry {
                outer: h,
                inner: Some(sigma),
                fos,
                incomplete,
                status: outcome.status,
                repaired: outcome.repaired,
                objective: value,
                incumbent: best.as_ref().map(|b| b.1),
            });
        }
        if let Some(v_bar) = previous_mean {
            if v_bar > 0.0 && !samples.is_empty() {
                tau_update(&mut table, &samples, v_bar, lower.min(v_bar))?;
            }
        }
        if !samples.is_empty() {
            previous_mean = Some(samples.iter().map(|s| s.1).sum::<f64>() / samples.len() as f64);
        }
        log::info!(
            "outer iteration {h}: {} feasible of {}, best {:?}",
            samples.len(),
            params.sigma,
            best.as_ref().map(|b| b.1)
        );
    }

    let test_mode = params.is_test_mode();
    if let Some((x, v)) = best.clone() {
        if test_mode || start.elapsed() < params.global_time_limit {
            let center = solution_center(plain, &x);
            let out = vlns(instance, plain, &center, params, VlnsMode::Improve { incumbent: v })?;
            let mut value = None;
            if let Some(y) = &out.solution {
                if accept(instance, plain, y) {
                    value = Some(out.objective);
                    best = Some((y.clone(), out.objective));
                }
            }
            trace.push(TraceEntry {
                outer: h,
                inner: None,
                fos: Fos::new(),
                incomplete: Vec::new(),
                status: out.status,
                repaired: false,
                objective: value,
                incumbent: best.as_ref().map(|b| b.1),
            });
        }
    }

    Ok(match best {
        Some((x, v)) => RunResult {
            status: RunStatus::Solved,
            solution: Some(x),
            objective: Some(v),
            lower_bound: lower,
            gap: Some(if v > 0.0 { ogap(v, lower.min(v))? } else { 0.0 }),
            outer_iterations: h,
            trace,
        },
        None => RunResult {
            status: RunStatus::NoSolution,
            solution: None,
            objective: None,
            lower_bound: lower,
            gap: None,
            outer_iterations: h,
            trace,
        },
    })
}

/// Only solutions passing the independent checker become incumbents.
fn accept(instance: &Instance, plain: &ConflModel, x: &Assignment) -> bool {
    match verify_solution(instance, plain, x) {
        Ok(r) if r.feasible => true,
        Ok(r) => {
            log::warn!("discarding solver solution with {} violations", r.violation_count());
            false
        }
        Err(e) => {
            log::warn!("discarding solver solution: {e}");
            false
        }
    }
}
