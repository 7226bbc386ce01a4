//! Dense bounded-variable revised simplex.
//!
//! Every row `a·x (sense) b` receives a slack `s` with `a·x + s = b`; the
//! sense is encoded in the slack bounds. Rows whose residual cannot be
//! absorbed by the slack at the start get an artificial column, and phase 1
//! minimizes the sum of artificials. The basis inverse is kept explicitly
//! and updated with one elimination step per pivot, with a periodic
//! refactorization from scratch.

use log::trace;

use crate::error::SolverError;
use crate::model::{Assignment, Model, Sense};

const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-11;
const DEGENERATE_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptions {
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Pivots between two refactorizations of the basis inverse.
    pub refactor_interval: usize,
    /// Hard cap on pivots; `None` picks a size-dependent default.
    pub max_iterations: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            bland_after: 1000,
            refactor_interval: 100,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of an LP solve. `objective` is `+inf` when infeasible and `-inf`
/// when unbounded; `assignment` is present only when optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub assignment: Option<Assignment>,
}

/// Column-compressed copy of a model's rows, reused across many solves that
/// differ only in variable bounds.
#[derive(Debug, Clone)]
pub(crate) struct LpData {
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    sense: Vec<Sense>,
}

impl LpData {
    pub(crate) fn from_model(model: &Model) -> Self {
        let mut cols = vec![Vec::new(); model.num_variables()];
        for (i, row) in model.constraints().iter().enumerate() {
            for &(var, coef) in &row.terms {
                if coef != 0.0 {
                    cols[var.0].push((i, coef));
                }
            }
        }
        LpData {
            cols,
            cost: model.costs().to_vec(),
            rhs: model.constraints().iter().map(|r| r.rhs).collect(),
            sense: model.constraints().iter().map(|r| r.sense).collect(),
        }
    }

    fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    fn num_cols(&self) -> usize {
        self.cols.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { values: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
    /// Free nonbasic variable resting at zero.
    AtZero,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Simplex<'a> {
    data: &'a LpData,
    m: usize,
    n: usize,
    /// Single-entry columns of slacks (first m) and artificials.
    unit_cols: Vec<(usize, f64)>,
    lo: Vec<f64>,
    up: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    /// Row-major m×m basis inverse.
    binv: Vec<f64>,
    cost: Vec<f64>,
    opts: &'a SimplexOptions,
    iterations: usize,
    max_iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
    scratch_y: Vec<f64>,
    scratch_alpha: Vec<f64>,
}

/// Solves `min c·x` over the model rows with the given variable bounds.
pub(crate) fn solve_bounded(
    data: &LpData,
    lower: &[f64],
    upper: &[f64],
    opts: &SimplexOptions,
) -> Result<LpOutcome, SolverError> {
    let mut s = Simplex::new(data, lower, upper, opts);
    if s.unit_cols.len() > s.m {
        s.cost = vec![0.0; s.total()];
        for j in s.n + s.m..s.total() {
            s.cost[j] = 1.0;
        }
        s.run_phase()?;
        let infeasibility: f64 = (s.n + s.m..s.total()).map(|j| s.x[j]).sum();
        let scale = 1.0 + data.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        trace!("phase 1 finished after {} pivots, infeasibility {infeasibility:e}", s.iterations);
        if infeasibility > 1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }
        for j in s.n + s.m..s.total() {
            s.lo[j] = 0.0;
            s.up[j] = 0.0;
            if s.state[j] != State::Basic {
                s.x[j] = 0.0;
                s.state[j] = State::AtLower;
            }
        }
    }
    s.cost = vec![0.0; s.total()];
    s.cost[..s.n].copy_from_slice(&data.cost);
    match s.run_phase()? {
        PhaseEnd::Unbounded => Ok(LpOutcome::Unbounded),
        PhaseEnd::Optimal => {
            let mut values = s.x[..s.n].to_vec();
            for (j, v) in values.iter_mut().enumerate() {
                *v = v.clamp(lower[j], upper[j]);
            }
            let objective = data.cost.iter().zip(&values).map(|(c, x)| c * x).sum();
            trace!("phase 2 finished after {} pivots, objective {objective}", s.iterations);
            Ok(LpOutcome::Optimal { values, objective })
        }
    }
}

impl<'a> Simplex<'a> {
    fn new(data: &'a LpData, lower: &[f64], upper: &[f64], opts: &'a SimplexOptions) -> Self {
        let m = data.num_rows();
        let n = data.num_cols();
        let mut lo = Vec::with_capacity(n + 2 * m);
        let mut up = Vec::with_capacity(n + 2 * m);
        let mut x = Vec::with_capacity(n + 2 * m);
        let mut state = Vec::with_capacity(n + 2 * m);
        for j in 0..n {
            lo.push(lower[j]);
            up.push(upper[j]);
            let (v, st) = if lower[j].is_finite() {
                (lower[j], State::AtLower)
            } else if upper[j].is_finite() {
                (upper[j], State::AtUpper)
            } else {
                (0.0, State::AtZero)
            };
            x.push(v);
            state.push(st);
        }
        let mut residual = data.rhs.clone();
        for (j, col) in data.cols.iter().enumerate() {
            if x[j] != 0.0 {
                for &(i, a) in col {
                    residual[i] -= a * x[j];
                }
            }
        }

        let mut unit_cols: Vec<(usize, f64)> = (0..m).map(|i| (i, 1.0)).collect();
        let mut basis = vec![0; m];
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            let (slo, sup) = match data.sense[i] {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lo.push(slo);
            up.push(sup);
            let r = residual[i];
            if r >= slo && r <= sup {
                x.push(r);
                state.push(State::Basic);
                basis[i] = n + i;
                binv[i * m + i] = 1.0;
            } else {
                x.push(0.0);
                state.push(if slo == 0.0 { State::AtLower } else { State::AtUpper });
            }
        }
        for i in 0..m {
            if state[n + i] == State::Basic {
                continue;
            }
            let sign = if residual[i] >= 0.0 { 1.0 } else { -1.0 };
            let j = n + unit_cols.len();
            unit_cols.push((i, sign));
            lo.push(0.0);
            up.push(f64::INFINITY);
            x.push(residual[i].abs());
            state.push(State::Basic);
            basis[i] = j;
            binv[i * m + i] = sign;
        }
        let max_iterations = opts
            .max_iterations
            .unwrap_or(50 * (n + 2 * m) + 10_000);
        Simplex {
            data,
            m,
            n,
            unit_cols,
            lo,
            up,
            x,
            state,
            basis,
            binv,
            cost: Vec::new(),
            opts,
            iterations: 0,
            max_iterations,
            since_refactor: 0,
            degenerate_run: 0,
            scratch_y: vec![0.0; m],
            scratch_alpha: vec![0.0; m],
        }
    }

    fn total(&self) -> usize {
        self.n + self.unit_cols.len()
    }

    fn column(&self, j: usize) -> &[(usize, f64)] {
        if j < self.n {
            &self.data.cols[j]
        } else {
            std::slice::from_ref(&self.unit_cols[j - self.n])
        }
    }

    fn refactor_interval(&self) -> usize {
        self.opts.refactor_interval.max(self.m / 4).max(1)
    }

    fn run_phase(&mut self) -> Result<PhaseEnd, SolverError> {
        self.degenerate_run = 0;
        loop {
            if self.since_refactor >= self.refactor_interval() {
                self.refactor()?;
            }
            self.compute_duals();
            let bland = self.degenerate_run >= self.opts.bland_after;
            let Some((q, dir)) = self.price(bland) else {
                if self.since_refactor > 0 {
                    // Confirm optimality on a freshly factorized basis.
                    self.refactor()?;
                    continue;
                }
                return Ok(PhaseEnd::Optimal);
            };
            if self.iterations >= self.max_iterations {
                return Err(SolverError::IterationLimit(self.iterations));
            }
            self.iterations += 1;
            self.compute_column(q);
            match self.ratio_test(q, dir, bland) {
                None => return Ok(PhaseEnd::Unbounded),
                Some((theta, leave)) => self.step(q, dir, theta, leave),
            }
        }
    }

    fn compute_duals(&mut self) {
        let m = self.m;
        let y = &mut self.scratch_y;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, b) in y.iter_mut().zip(row) {
                    *yk += cb * b;
                }
            }
        }
    }

    fn reduced_cost(&self, j: usize) -> f64 {
        let dot: f64 = self
            .column(j)
            .iter()
            .map(|&(i, a)| self.scratch_y[i] * a)
            .sum();
        self.cost[j] - dot
    }

    /// Picks the entering column and its direction (+1 increase, -1 decrease).
    fn price(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.total() {
            let st = self.state[j];
            if st == State::Basic || self.lo[j] == self.up[j] {
                continue;
            }
            let d = self.reduced_cost(j);
            let dir = match st {
                State::AtLower if d < -DUAL_TOL => 1.0,
                State::AtUpper if d > DUAL_TOL => -1.0,
                State::AtZero if d.abs() > DUAL_TOL => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if d.abs() > best_score {
                best_score = d.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn compute_column(&mut self, q: usize) {
        let m = self.m;
        let alpha = &mut self.scratch_alpha;
        alpha.iter_mut().for_each(|v| *v = 0.0);
        let col: &[(usize, f64)] = if q < self.n {
            &self.data.cols[q]
        } else {
            std::slice::from_ref(&self.unit_cols[q - self.n])
        };
        for &(r, a) in col {
            for (i, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[i * m + r] * a;
            }
        }
    }

    /// Returns the step length and, unless the entering variable just flips
    /// bounds, the basis position that leaves (with the bound it lands on).
    fn ratio_test(&self, q: usize, dir: f64, bland: bool) -> Option<(f64, Option<(usize, bool)>)> {
        let mut theta = self.up[q] - self.lo[q];
        let mut leave: Option<(usize, bool)> = None;
        let mut leave_key = 0.0;
        for i in 0..self.m {
            let a = self.scratch_alpha[i];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let rate = -dir * a;
            let j = self.basis[i];
            let (limit, to_upper) = if rate < 0.0 {
                if !self.lo[j].is_finite() {
                    continue;
                }
                ((self.x[j] - self.lo[j]).max(0.0) / -rate, false)
            } else {
                if !self.up[j].is_finite() {
                    continue;
                }
                ((self.up[j] - self.x[j]).max(0.0) / rate, true)
            };
            // Among near-ties prefer the largest pivot, or the lowest
            // variable index under Bland's rule.
            let key = if bland { -(j as f64) } else { a.abs() };
            if limit < theta - RATIO_TIE || (leave.is_some() && limit <= theta + RATIO_TIE && key > leave_key)
            {
                if limit < theta - RATIO_TIE || leave.is_none() {
                    theta = limit;
                } else {
                    theta = theta.min(limit);
                }
                leave = Some((i, to_upper));
                leave_key = key;
            }
        }
        if theta == f64::INFINITY {
            None
        } else {
            Some((theta, leave))
        }
    }

    fn step(&mut self, q: usize, dir: f64, theta: f64, leave: Option<(usize, bool)>) {
        if theta <= DEGENERATE_STEP {
            self.degenerate_run += 1;
        } else {
            self.degenerate_run = 0;
        }
        if theta > 0.0 {
            self.x[q] += dir * theta;
            for i in 0..self.m {
                let a = self.scratch_alpha[i];
                if a != 0.0 {
                    self.x[self.basis[i]] -= dir * a * theta;
                }
            }
        }
        match leave {
            None => {
                if dir > 0.0 {
                    self.x[q] = self.up[q];
                    self.state[q] = State::AtUpper;
                } else {
                    self.x[q] = self.lo[q];
                    self.state[q] = State::AtLower;
                }
            }
            Some((r, to_upper)) => {
                let out = self.basis[r];
                if to_upper {
                    self.x[out] = self.up[out];
                    self.state[out] = State::AtUpper;
                } else {
                    self.x[out] = self.lo[out];
                    self.state[out] = State::AtLower;
                }
                self.basis[r] = q;
                self.state[q] = State::Basic;
                self.pivot_inverse(r);
                self.since_refactor += 1;
            }
        }
    }

    fn pivot_inverse(&mut self, r: usize) {
        let m = self.m;
        let piv = self.scratch_alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (row_r, after) = rest.split_at_mut(m);
        for v in row_r.iter_mut() {
            *v /= piv;
        }
        for (i, row) in before.chunks_mut(m).enumerate() {
            let a = self.scratch_alpha[i];
            if a != 0.0 {
                for (v, p) in row.iter_mut().zip(row_r.iter()) {
                    *v -= a * p;
                }
            }
        }
        for (k, row) in after.chunks_mut(m).enumerate() {
            let a = self.scratch_alpha[r + 1 + k];
            if a != 0.0 {
                for (v, p) in row.iter_mut().zip(row_r.iter()) {
                    *v -= a * p;
                }
            }
        }
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination with partial
    /// pivoting and recomputes the basic values from the nonbasic ones.
    fn refactor(&mut self) -> Result<(), SolverError> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for &(i, a) in self.column(j) {
                b[i * m + k] = a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&a, &b2| b[a * m + c].abs().total_cmp(&b[b2 * m + c].abs()))
                .unwrap_or(c);
            if b[p * m + c].abs() < 1e-12 {
                return Err(SolverError::SingularBasis);
            }
            if p != c {
                for k in 0..m {
                    b.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = b[c * m + c];
            for k in 0..m {
                b[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for i in 0..m {
                if i == c {
                    continue;
                }
                let f = b[i * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        b[i * m + k] -= f * b[c * m + k];
                        inv[i * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        // inv now maps row space to basis positions: B^{-1}.
        self.binv = inv;

        let mut rhs = self.data.rhs.clone();
        for j in 0..self.total() {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                for &(i, a) in self.column(j) {
                    rhs[i] -= a * xj;
                }
            }
        }
        for k in 0..m {
            let row = &self.binv[k * m..(k + 1) * m];
            let v: f64 = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
            self.x[self.basis[k]] = v;
        }
        self.since_refactor = 0;
        Ok(())
    }
}

/// Solves a purely continuous model.
pub(crate) fn solve_continuous(model: &Model, opts: &SimplexOptions) -> Result<LpResult, SolverError> {
    if let Some(v) = model.variables().iter().find(|v| v.is_binary()) {
        return Err(SolverError::BinaryInLp(v.name.clone()));
    }
    let data = LpData::from_model(model);
    let lower: Vec<f64> = model.variables().iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.variables().iter().map(|v| v.upper).collect();
    Ok(match solve_bounded(&data, &lower, &upper, opts)? {
        LpOutcome::Optimal { values, objective } => LpResult {
            status: LpStatus::Optimal,
            objective,
            assignment: Some(Assignment::new(values)),
        },
        LpOutcome::Infeasible => LpResult {
            status: LpStatus::Infeasible,
            objective: f64::INFINITY,
            assignment: None,
        },
        LpOutcome::Unbounded => LpResult {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            assignment: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LinearConstraint, VarKind};

    fn lp(vars: &[(f64, f64, f64)], rows: &[(&[f64], Sense, f64)]) -> Model {
        let mut m = Model::new();
        let ids: Vec<_> = vars
            .iter()
            .enumerate()
            .map(|(k, &(lo, up, c))| {
                let id = m.add_variable(format!("x{k}"), VarKind::Continuous, lo, up).unwrap();
                m.set_cost(id, c).unwrap();
                id
            })
            .collect();
        for (r, (coefs, sense, rhs)) in rows.iter().enumerate() {
            let terms = ids.iter().zip(coefs.iter()).filter(|(_, c)| **c != 0.0).map(|(i, c)| (*i, *c)).collect();
            m.add_constraint(LinearConstraint::new(format!("r{r}"), terms, *sense, *rhs))
                .unwrap();
        }
        m
    }

    fn solve(m: &Model) -> LpResult {
        solve_continuous(m, &SimplexOptions::default()).unwrap()
    }

    #[test]
    fn lower_bounded_single_variable() {
        let m = lp(&[(0.0, 10.0, 1.0)], &[(&[1.0], Sense::Ge, 3.0)]);
        let r = solve(&m);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_ray() {
        let m = lp(&[(0.0, f64::INFINITY, -1.0)], &[(&[1.0], Sense::Ge, 0.0)]);
        assert_eq!(solve(&m).status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_rows() {
        let m = lp(
            &[(0.0, 1.0, 1.0), (0.0, 1.0, 1.0)],
            &[(&[1.0, 1.0], Sense::Ge, 3.0)],
        );
        assert_eq!(solve(&m).status, LpStatus::Infeasible);
    }

    #[test]
    fn classic_two_variable_lp() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 → (2, 6), 36.
        let m = lp(
            &[(0.0, f64::INFINITY, -3.0), (0.0, f64::INFINITY, -5.0)],
            &[
                (&[1.0, 0.0], Sense::Le, 4.0),
                (&[0.0, 2.0], Sense::Le, 12.0),
                (&[3.0, 2.0], Sense::Le, 18.0),
            ],
        );
        let r = solve(&m);
        assert!((r.objective + 36.0).abs() < 1e-9);
        let x = r.assignment.unwrap();
        assert!((x.values()[0] - 2.0).abs() < 1e-9 && (x.values()[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + y, x - y = 1, x free, y in [-2, 5] → y = -2, x = -1, obj -3.
        let m = lp(
            &[(f64::NEG_INFINITY, f64::INFINITY, 1.0), (-2.0, 5.0, 1.0)],
            &[(&[1.0, -1.0], Sense::Eq, 1.0)],
        );
        let r = solve(&m);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_binaries() {
        let mut m = Model::new();
        m.add_variable("b", VarKind::Binary, 0.0, 1.0).unwrap();
        assert!(matches!(
            solve_continuous(&m, &SimplexOptions::default()),
            Err(SolverError::BinaryInLp(_))
        ));
    }

    #[test]
    fn bland_mode_reaches_same_optimum() {
        // Degenerate LP (Beale's cycling example) solved with Bland from the start.
        let m = lp(
            &[
                (0.0, f64::INFINITY, -0.75),
                (0.0, f64::INFINITY, 150.0),
                (0.0, f64::INFINITY, -0.02),
                (0.0, f64::INFINITY, 6.0),
            ],
            &[
                (&[0.25, -60.0, -0.04, 9.0], Sense::Le, 0.0),
                (&[0.5, -90.0, -0.02, 3.0], Sense::Le, 0.0),
                (&[0.0, 0.0, 1.0, 0.0], Sense::Le, 1.0),
            ],
        );
        let opts = SimplexOptions {
            bland_after: 0,
            ..SimplexOptions::default()
        };
        let bland = solve_continuous(&m, &opts).unwrap();
        let dantzig = solve(&m);
        assert_eq!(bland.status, LpStatus::Optimal);
        assert!((bland.objective + 0.05).abs() < 1e-9, "{}", bland.objective);
        assert!((dantzig.objective - bland.objective).abs() < 1e-9);
    }

    #[test]
    fn empty_model() {
        let r = solve(&Model::new());
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.objective, 0.0);
    }
}
