//! Best-bound branch-and-bound over the bundled simplex.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use log::debug;

use crate::error::SolverError;
use crate::model::{Assignment, Model, VarKind};
use crate::simplex::{solve_bounded, LpData, LpOutcome, SimplexOptions};
use crate::INTEGRALITY_TOL;

/// Nodes whose bound is within this distance of the incumbent are pruned.
const PRUNE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Feasible,
    Infeasible,
    /// A time or node limit stopped the search before any incumbent.
    TimeoutNoIncumbent,
}

impl MipStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, MipStatus::Optimal | MipStatus::Feasible)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipLimits {
    pub time_limit: Duration,
    /// Optional cap on processed nodes; used for reproducible runs.
    pub node_limit: Option<usize>,
}

impl MipLimits {
    pub fn time(time_limit: Duration) -> Self {
        MipLimits {
            time_limit,
            node_limit: None,
        }
    }

    pub fn nodes(node_limit: usize) -> Self {
        MipLimits {
            time_limit: Duration::from_secs(u64::MAX / 4),
            node_limit: Some(node_limit),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipResult {
    pub status: MipStatus,
    pub incumbent: Option<Assignment>,
    /// Objective of the incumbent, `+inf` without one.
    pub objective: f64,
    /// Global lower bound at termination.
    pub lower_bound: f64,
    pub elapsed: Duration,
    pub nodes: usize,
}

impl MipResult {
    /// Relative gap `(objective - bound) / |objective|`, 0 when both vanish.
    pub fn relative_gap(&self) -> f64 {
        if !self.objective.is_finite() {
            return f64::INFINITY;
        }
        let diff = (self.objective - self.lower_bound).max(0.0);
        if diff == 0.0 {
            0.0
        } else {
            diff / self.objective.abs().max(1e-12)
        }
    }
}

struct Node {
    bound: f64,
    depth: usize,
    seq: usize,
    /// (variable index, fixed value) branching decisions from the root.
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: the "greatest" node is the one with the
    // lowest bound, then the deepest, then the oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

pub(crate) fn branch_and_bound(
    model: &Model,
    limits: &MipLimits,
    opts: &SimplexOptions,
) -> Result<MipResult, SolverError> {
    if limits.time_limit.is_zero() {
        return Err(SolverError::InvalidTimeLimit);
    }
    let start = Instant::now();
    let data = LpData::from_model(model);
    let base_lo: Vec<f64> = model.variables().iter().map(|v| v.lower).collect();
    let base_up: Vec<f64> = model.variables().iter().map(|v| v.upper).collect();
    let binaries: Vec<usize> = model
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(i, _)| i)
        .collect();

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        depth: 0,
        seq: 0,
        fixings: Vec::new(),
    });
    let mut seq = 1;
    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut lower_bound = f64::NEG_INFINITY;
    let mut nodes = 0;
    let mut stopped = false;
    let (mut lo, mut up) = (base_lo.clone(), base_up.clone());

    while let Some(node) = heap.pop() {
        let cutoff = incumbent.as_ref().map_or(f64::INFINITY, |(_, v)| *v);
        if node.bound >= cutoff - PRUNE_TOL {
            // Best-bound order: every remaining node is at least as bad.
            heap.clear();
            break;
        }
        if start.elapsed() >= limits.time_limit || limits.node_limit.is_some_and(|l| nodes >= l) {
            heap.push(node);
            stopped = true;
            break;
        }
        lower_bound = lower_bound.max(node.bound.min(cutoff));
        nodes += 1;

        lo.copy_from_slice(&base_lo);
        up.copy_from_slice(&base_up);
        for &(j, v) in &node.fixings {
            lo[j] = v;
            up[j] = v;
        }
        let (values, obj) = match solve_bounded(&data, &lo, &up, opts)? {
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => return Err(SolverError::Unbounded),
            LpOutcome::Optimal { values, objective } => (values, objective),
        };
        if obj >= cutoff - PRUNE_TOL {
            continue;
        }

        let branch = binaries
            .iter()
            .map(|&j| (j, values[j] - values[j].floor()))
            .filter(|&(_, f)| f > INTEGRALITY_TOL && f < 1.0 - INTEGRALITY_TOL)
            .min_by(|a, b| {
                (a.1 - 0.5)
                    .abs()
                    .total_cmp(&(b.1 - 0.5).abs())
                    .then(a.0.cmp(&b.0))
            });

        match branch {
            None => {
                // Integral within tolerance: snap binaries and re-solve the
                // continuous part so the stored point is exactly 0/1.
                for &j in &binaries {
                    let r = values[j].round();
                    lo[j] = r;
                    up[j] = r;
                }
                if let LpOutcome::Optimal { values, objective } = solve_bounded(&data, &lo, &up, opts)? {
                    if objective < cutoff - PRUNE_TOL {
                        debug!("node {nodes}: new incumbent {objective}");
                        incumbent = Some((values, objective));
                    }
                }
            }
            Some((j, frac)) => {
                let first = if frac >= 0.5 { 1.0 } else { 0.0 };
                for v in [first, 1.0 - first] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, v));
                    heap.push(Node {
                        bound: obj,
                        depth: node.depth + 1,
                        seq,
                        fixings,
                    });
                    seq += 1;
                }
            }
        }
    }

    let elapsed = start.elapsed();
    let (status, incumbent, objective) = match incumbent {
        Some((values, obj)) => {
            let status = if stopped { MipStatus::Feasible } else { MipStatus::Optimal };
            (status, Some(Assignment::new(values)), obj)
        }
        None if stopped => (MipStatus::TimeoutNoIncumbent, None, f64::INFINITY),
        None => (MipStatus::Infeasible, None, f64::INFINITY),
    };
    let lower_bound = if stopped {
        let open = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
        lower_bound.max(open.min(objective))
    } else {
        // Exhausted tree: the incumbent (or infeasibility) is proven.
        objective
    };
    debug!(
        "branch-and-bound: {status:?} after {nodes} nodes, objective {objective}, bound {lower_bound}"
    );
    Ok(MipResult {
        status,
        incumbent,
        objective,
        lower_bound,
        elapsed,
        nodes,
    })
}
