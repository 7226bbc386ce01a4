use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::ModelError;

/// Stable handle of a variable inside one [`Model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Stable handle of a constraint row inside one [`Model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintId(pub usize);

impl ConstraintId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

impl Variable {
    pub fn is_binary(&self) -> bool {
        self.kind == VarKind::Binary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// A linear row `Σ coef·var (sense) rhs`. The tag names the constraint
/// family and indices it was generated from, e.g. `SIR(f2,u7)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub tag: String,
}

impl LinearConstraint {
    pub fn new(tag: impl Into<String>, terms: Vec<(VarId, f64)>, sense: Sense, rhs: f64) -> Self {
        LinearConstraint {
            terms,
            sense,
            rhs,
            tag: tag.into(),
        }
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which the row is violated at `values` (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Dense value vector indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    values: Vec<f64>,
}

impl Assignment {
    pub fn new(values: Vec<f64>) -> Self {
        Assignment { values }
    }

    pub fn zeros(len: usize) -> Self {
        Assignment {
            values: vec![0.0; len],
        }
    }

    pub fn get(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    pub fn set(&mut self, var: VarId, value: f64) {
        self.values[var.0] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: ConstraintId,
    pub slack: f64,
}

/// Result of [`Model::evaluate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub violations: Vec<Violation>,
    /// Variables outside their bounds, or binaries away from {0, 1}.
    pub bound_violations: Vec<(VarId, f64)>,
}

impl Evaluation {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty() && self.bound_violations.is_empty()
    }
}

/// Minimization MILP over binary and continuous variables.
///
/// Variable and constraint handles are positions in insertion order, which is
/// also the canonical order used by every export.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Model {
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<f64>,
    names: HashMap<String, VarId>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        let name = name.into();
        if self.names.contains_key(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::InvertedBounds { name, lower, upper });
        }
        if kind == VarKind::Binary && !(is_zero_one(lower) && is_zero_one(upper)) {
            return Err(ModelError::BinaryBounds { name, lower, upper });
        }
        let id = VarId(self.variables.len());
        self.names.insert(name.clone(), id);
        self.variables.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        self.objective.push(0.0);
        Ok(id)
    }

    pub fn add_constraint(&mut self, constraint: LinearConstraint) -> Result<ConstraintId, ModelError> {
        if !constraint.rhs.is_finite() {
            return Err(ModelError::NonFinite(constraint.tag));
        }
        let mut seen = vec![false; self.variables.len()];
        for &(var, coef) in &constraint.terms {
            if var.0 >= self.variables.len() {
                return Err(ModelError::UnknownVariable(var));
            }
            if seen[var.0] {
                return Err(ModelError::DuplicateTerm {
                    tag: constraint.tag,
                    var,
                });
            }
            seen[var.0] = true;
            if !coef.is_finite() {
                return Err(ModelError::NonFinite(constraint.tag));
            }
        }
        let id = ConstraintId(self.constraints.len());
        self.constraints.push(constraint);
        Ok(id)
    }

    /// Sets the objective coefficient of `var`, replacing any previous one.
    pub fn set_cost(&mut self, var: VarId, cost: f64) -> Result<(), ModelError> {
        if var.0 >= self.variables.len() {
            return Err(ModelError::UnknownVariable(var));
        }
        if !cost.is_finite() {
            return Err(ModelError::NonFinite(self.variables[var.0].name.clone()));
        }
        self.objective[var.0] = cost;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, var: VarId) -> &Variable {
        &self.variables[var.0]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn constraint(&self, id: ConstraintId) -> &LinearConstraint {
        &self.constraints[id.0]
    }

    /// Dense objective vector aligned with [`Model::variables`].
    pub fn costs(&self) -> &[f64] {
        &self.objective
    }

    /// Nonzero objective terms in insertion order.
    pub fn objective_terms(&self) -> impl Iterator<Item = (VarId, f64)> + '_ {
        self.objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, &c)| (VarId(i), c))
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_binary())
            .map(|(i, _)| VarId(i))
    }

    pub fn has_binaries(&self) -> bool {
        self.variables.iter().any(Variable::is_binary)
    }

    /// Copy of the model with every binary turned into a continuous
    /// variable on its current bounds.
    pub fn lp_relaxation(&self) -> Model {
        let mut relaxed = self.clone();
        for var in &mut relaxed.variables {
            var.kind = VarKind::Continuous;
        }
        relaxed
    }

    /// Copy of the model where each fixed variable has `lower = upper = value`.
    pub fn apply_fixings(&self, fixings: &BTreeMap<VarId, f64>) -> Result<Model, ModelError> {
        let mut fixed = self.clone();
        for (&var, &value) in fixings {
            let Some(v) = fixed.variables.get_mut(var.0) else {
                return Err(ModelError::UnknownVariable(var));
            };
            if v.kind == VarKind::Binary && !is_zero_one(value) {
                return Err(ModelError::FixingNotBinary {
                    name: v.name.clone(),
                    value,
                });
            }
            if !(value >= v.lower && value <= v.upper) {
                return Err(ModelError::FixingOutOfBounds {
                    name: v.name.clone(),
                    value,
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            v.lower = value;
            v.upper = value;
        }
        Ok(fixed)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective
            .iter()
            .zip(values)
            .filter(|(c, _)| **c != 0.0)
            .map(|(c, x)| c * x)
            .sum()
    }

    /// Exact objective and every row whose violation exceeds `tol`.
    pub fn evaluate(&self, assignment: &Assignment, tol: f64) -> Result<Evaluation, ModelError> {
        if assignment.len() != self.variables.len() {
            return Err(ModelError::PartialAssignment {
                expected: self.variables.len(),
                got: assignment.len(),
            });
        }
        let values = assignment.values();
        if let Some(i) = values.iter().position(|x| x.is_nan()) {
            return Err(ModelError::MissingValue(self.variables[i].name.clone()));
        }
        let violations = self
            .constraints
            .iter()
            .enumerate()
            .filter_map(|(i, row)| {
                let slack = row.violation(values);
                (slack > tol).then_some(Violation {
                    constraint: ConstraintId(i),
                    slack,
                })
            })
            .collect();
        let bound_violations = self
            .variables
            .iter()
            .zip(values)
            .enumerate()
            .filter_map(|(i, (var, &x))| {
                let mut off = (var.lower - x).max(x - var.upper).max(0.0);
                if var.is_binary() {
                    off = off.max(x.min(1.0 - x).max(0.0));
                }
                (off > tol).then_some((VarId(i), off))
            })
            .collect();
        Ok(Evaluation {
            objective: self.objective_value(values),
            violations,
            bound_violations,
        })
    }
}

fn is_zero_one(x: f64) -> bool {
    x == 0.0 || x == 1.0
}
