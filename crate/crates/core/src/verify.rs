//! Solution checker working from the raw instance data rather than from
//! the rows of the built model.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use confl_milp::{Assignment, ModelError};

use crate::formulation::{ConflModel, NetNode, Variant};
use crate::instance::{CoreNode, Instance, Technology};

pub const TOL: f64 = 1e-6;
pub const SIR_TOL: f64 = 1e-6;
pub const FLOW_TOL: f64 = 1e-9;

/// Violations grouped by constraint family; each entry is a readable
/// description naming the offending objects.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub feasible: bool,
    pub single_tech: Vec<String>,
    pub assignment: Vec<String>,
    pub linking: Vec<String>,
    pub coverage: Vec<String>,
    pub flow: Vec<String>,
    pub capacity: Vec<String>,
    pub sir: Vec<String>,
    pub power_bounds: Vec<String>,
    pub integrality: Vec<String>,
    pub objective: f64,
}

impl VerificationReport {
    pub fn families(&self) -> [(&'static str, &Vec<String>); 9] {
        [
            ("single_tech", &self.single_tech),
            ("assignment", &self.assignment),
            ("linking", &self.linking),
            ("coverage", &self.coverage),
            ("flow", &self.flow),
            ("capacity", &self.capacity),
            ("sir", &self.sir),
            ("power_bounds", &self.power_bounds),
            ("integrality", &self.integrality),
        ]
    }

    pub fn violation_count(&self) -> usize {
        self.families().iter().map(|(_, v)| v.len()).sum()
    }
}

pub fn verify_solution(
    instance: &Instance,
    confl: &ConflModel,
    assignment: &Assignment,
) -> Result<VerificationReport, ModelError> {
    let n = confl.model.num_variables();
    if assignment.len() != n {
        return Err(ModelError::PartialAssignment { expected: n, got: assignment.len() });
    }
    if let Some(i) = assignment.values().iter().position(|v| !v.is_finite()) {
        return Err(ModelError::MissingValue(confl.model.variables()[i].name.clone()));
    }
    let val = |id| assignment.get(id);
    let mut r = VerificationReport::default();
    let nf = instance.facilities.len();
    let techs = &confl.techs;

    let binaries = confl
        .z
        .values()
        .chain(&confl.x)
        .chain(confl.y.values())
        .chain(confl.v.values());
    for &id in binaries {
        let x = val(id);
        if x.min((1.0 - x).abs()).abs() > TOL || !(-TOL..=1.0 + TOL).contains(&x) {
            r.integrality.push(format!("{} = {x}", confl.model.variable(id).name));
        }
    }

    // Opening level per facility, summed over technologies.
    let opened: Vec<f64> = (0..nf)
        .map(|f| techs.iter().map(|&t| val(confl.z[&(f, t)])).sum())
        .collect();
    for (f, &s) in opened.iter().enumerate() {
        if s > 1.0 + TOL {
            r.single_tech.push(format!("facility {f} opened {s} times"));
        }
    }

    for &t in techs {
        let arcs = instance.assignment_arcs.get(t);
        for u in &instance.users {
            let served: f64 = arcs
                .iter()
                .filter(|a| a.user == u.id)
                .map(|a| val(confl.y[&(a.facility, u.id, t)]))
                .sum();
            let v = val(confl.v[&(u.id, t)]);
            if (served - v).abs() > TOL {
                r.assignment.push(format!("user {} on {t}: {served} arcs vs v = {v}", u.id));
            }
        }
        for a in arcs {
            let (y, z) = (val(confl.y[&(a.facility, a.user, t)]), val(confl.z[&(a.facility, t)]));
            if y > z + TOL {
                r.linking.push(format!("user {} uses facility {} on {t} with z = {z}", a.user, a.facility));
            }
        }
    }

    for (k, &t) in techs.iter().enumerate() {
        let covered: f64 = instance
            .users
            .iter()
            .map(|u| u.weight * techs[..=k].iter().map(|&s| val(confl.v[&(u.id, s)])).sum::<f64>())
            .sum();
        if covered < instance.threshold(t) - TOL {
            r.coverage.push(format!("{t}: covered weight {covered} < {}", instance.threshold(t)));
        }
    }

    check_network(instance, confl, &val, &opened, &mut r);

    if confl.variant == Variant::ThreeTech {
        let w = instance.wireless().map_err(|_| ModelError::MissingValue("wireless".into()))?;
        let t3 = Technology::Wireless;
        let power: Vec<f64> = confl.p.iter().map(|&id| val(id)).collect();
        for f in 0..nf {
            let (z, p) = (val(confl.z[&(f, t3)]), power[f]);
            let (lo, hi) = if z > 0.5 { (w.p_min, w.p_max) } else { (0.0, 0.0) };
            if p < lo - TOL || p > hi + TOL {
                r.power_bounds.push(format!("p_f{f} = {p} outside [{lo}, {hi}] (z = {z})"));
            }
        }
        for a in instance.assignment_arcs.get(t3) {
            if val(confl.y[&(a.facility, a.user, t3)]) < 0.5 {
                continue;
            }
            let (f, u) = (a.facility, a.user);
            let interference: f64 = (0..nf).filter(|&k| k != f).map(|k| w.fading(k, u) * power[k]).sum();
            let ratio = w.fading(f, u) * power[f] / (w.noise + interference);
            if ratio < w.delta - SIR_TOL {
                r.sir.push(format!("user {u} served by {f}: SIR {ratio} < {}", w.delta));
            }
        }
    }

    r.objective = objective(instance, confl, &val);
    r.feasible = r.violation_count() == 0;
    Ok(r)
}

fn objective(instance: &Instance, confl: &ConflModel, val: &dyn Fn(confl_milp::VarId) -> f64) -> f64 {
    let mut total = 0.0;
    for f in &instance.facilities {
        for &t in &confl.techs {
            total += f.open_cost[t.index()] * val(confl.z[&(f.id, t)]);
        }
    }
    for c in &instance.central_offices {
        let root = NetNode::Root;
        let id = confl.x_var(root, NetNode::Core(CoreNode::CentralOffice(c.id))).expect("root arc");
        total += c.open_cost * val(id);
    }
    for a in &instance.core_arcs {
        let id = confl.x_var(NetNode::Core(a.tail), NetNode::Core(a.head)).expect("core arc");
        total += a.cost * val(id);
    }
    for &t in &confl.techs {
        for a in instance.assignment_arcs.get(t) {
            total += a.cost * val(confl.y[&(a.facility, a.user, t)]);
        }
    }
    total
}

/// Flow conservation and arc capacities per commodity, plus a reachability
/// check: every open facility must be reachable from the root over
/// installed arcs.
fn check_network(
    instance: &Instance,
    confl: &ConflModel,
    val: &dyn Fn(confl_milp::VarId) -> f64,
    opened: &[f64],
    r: &mut VerificationReport,
) {
    let nodes = ConflModel::nodes(instance);
    for (f, &supply) in opened.iter().enumerate() {
        let mut balance: BTreeMap<NetNode, f64> = nodes.iter().map(|&n| (n, 0.0)).collect();
        for (k, arc) in confl.arcs.iter().enumerate() {
            let flow = val(confl.phi[k][f]);
            *balance.get_mut(&arc.head).unwrap() += flow;
            *balance.get_mut(&arc.tail).unwrap() -= flow;
            let x = val(confl.x[k]);
            if flow < -FLOW_TOL || flow > x + FLOW_TOL {
                r.capacity.push(format!("commodity f{f} on {}->{}: {flow} with x = {x}", arc.tail, arc.head));
            }
        }
        let own = NetNode::Core(CoreNode::Facility(f));
        for (node, b) in balance {
            let want = match node {
                NetNode::Root => -supply,
                n if n == own => supply,
                _ => 0.0,
            };
            if (b - want).abs() > FLOW_TOL {
                r.flow.push(format!("commodity f{f} at {node}: net inflow {b}, expected {want}"));
            }
        }
    }

    let installed: Vec<_> = confl
        .arcs
        .iter()
        .zip(&confl.x)
        .filter(|(_, &id)| val(id) > 0.5)
        .map(|(a, _)| (a.tail, a.head))
        .collect();
    let mut reached = BTreeSet::from([NetNode::Root]);
    let mut queue = VecDeque::from([NetNode::Root]);
    while let Some(n) = queue.pop_front() {
        for &(tail, head) in &installed {
            if tail == n && reached.insert(head) {
                queue.push_back(head);
            }
        }
    }
    for (f, &s) in opened.iter().enumerate() {
        if s > 0.5 && !reached.contains(&NetNode::Core(CoreNode::Facility(f))) {
            r.flow.push(format!("open facility {f} is not connected to the root"));
        }
    }
}
