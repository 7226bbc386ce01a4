//! MILP formulations of the 2- and 3-technology connected facility location
//! problem with a multicommodity-flow model of the core network.

use std::collections::BTreeMap;
use std::fmt;

use confl_milp::{ConstraintId, LinearConstraint, Model, Sense, VarId, VarKind};

use crate::error::{BuildError, InstanceError};
use crate::instance::{CoreNode, Instance, Technology};

/// Constraint tag prefixes, one per family.
pub mod tags {
    pub const SINGLE_TECH: &str = "SINGLE_TECH";
    pub const ASSIGN: &str = "ASSIGN";
    pub const LINK: &str = "LINK";
    pub const COVER: &str = "COVER";
    pub const FLOW: &str = "FLOW";
    pub const CAP: &str = "CAP";
    pub const PMIN: &str = "PMIN";
    pub const PMAX: &str = "PMAX";
    pub const SIR: &str = "SIR";
    pub const SUPER: &str = "SUPER";
    pub const CONF: &str = "CONF";
}

/// Node of the flow network: the artificial root or a core node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NetNode {
    Root,
    Core(CoreNode),
}

impl fmt::Display for NetNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetNode::Root => write!(f, "r"),
            NetNode::Core(n) => n.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetArc {
    pub tail: NetNode,
    pub head: NetNode,
    pub cost: f64,
}

/// Which formulation a [`ConflModel`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    TwoTech,
    ThreeTech,
}

/// A built model together with the maps from problem objects to variables.
#[derive(Debug, Clone)]
pub struct ConflModel {
    pub model: Model,
    pub variant: Variant,
    pub techs: Vec<Technology>,
    /// Root arcs r -> γ (one per central office, in order), then core arcs.
    pub arcs: Vec<NetArc>,
    pub z: BTreeMap<(usize, Technology), VarId>,
    /// Indexed like `arcs`.
    pub x: Vec<VarId>,
    /// Keyed by (facility, user, technology).
    pub y: BTreeMap<(usize, usize, Technology), VarId>,
    pub v: BTreeMap<(usize, Technology), VarId>,
    /// `phi[arc][facility]`.
    pub phi: Vec<Vec<VarId>>,
    /// Empty for the two-technology model.
    pub p: Vec<VarId>,
    pub sir_rows: BTreeMap<(usize, usize), ConstraintId>,
    pub super_rows: Vec<ConstraintId>,
    pub conflict_rows: Vec<ConstraintId>,
}

impl ConflModel {
    pub fn z_var(&self, f: usize, t: Technology) -> VarId {
        self.z[&(f, t)]
    }

    pub fn y_var(&self, f: usize, u: usize, t: Technology) -> Option<VarId> {
        self.y.get(&(f, u, t)).copied()
    }

    pub fn x_var(&self, tail: NetNode, head: NetNode) -> Option<VarId> {
        self.arcs
            .iter()
            .position(|a| a.tail == tail && a.head == head)
            .map(|k| self.x[k])
    }

    pub fn is_strengthened(&self) -> bool {
        !self.super_rows.is_empty() || !self.conflict_rows.is_empty()
    }

    /// Network nodes in row order: root, facilities, central offices, Steiner nodes.
    pub fn nodes(instance: &Instance) -> Vec<NetNode> {
        let mut nodes = vec![NetNode::Root];
        nodes.extend((0..instance.facilities.len()).map(|i| NetNode::Core(CoreNode::Facility(i))));
        nodes.extend((0..instance.central_offices.len()).map(|i| NetNode::Core(CoreNode::CentralOffice(i))));
        nodes.extend((0..instance.steiner_nodes.len()).map(|i| NetNode::Core(CoreNode::Steiner(i))));
        nodes
    }
}

/// Root arcs followed by the core arcs of the instance.
pub fn network_arcs(instance: &Instance) -> Vec<NetArc> {
    let root = instance.central_offices.iter().map(|c| NetArc {
        tail: NetNode::Root,
        head: NetNode::Core(CoreNode::CentralOffice(c.id)),
        cost: c.open_cost,
    });
    let core = instance.core_arcs.iter().map(|a| NetArc {
        tail: NetNode::Core(a.tail),
        head: NetNode::Core(a.head),
        cost: a.cost,
    });
    root.chain(core).collect()
}

/// Fiber/copper model over T = {1, 2}.
pub fn build_2confl(instance: &Instance) -> Result<ConflModel, BuildError> {
    instance.validate()?;
    build(instance, Variant::TwoTech)
}

/// Three-technology model: the fiber/copper rows plus power variables,
/// power bounds and one big-M SIR row per wireless assignment arc.
pub fn build_3confl(instance: &Instance) -> Result<ConflModel, BuildError> {
    instance.validate()?;
    instance.wireless()?;
    build(instance, Variant::ThreeTech)
}

/// M_fu = δη + δ Σ_{k≠f} a_ku P_max: the smallest constant for which the SIR
/// row of (f, u) holds at every power vector in the box once y_fu^3 = 0.
pub fn big_m(instance: &Instance, f: usize, u: usize) -> Result<f64, InstanceError> {
    let w = instance.wireless()?;
    let interference: f64 = (0..instance.facilities.len())
        .filter(|&k| k != f)
        .map(|k| w.fading(k, u))
        .sum();
    Ok(w.delta * w.noise + w.delta * interference * w.p_max)
}

fn build(instance: &Instance, variant: Variant) -> Result<ConflModel, BuildError> {
    let techs: Vec<Technology> = match variant {
        Variant::TwoTech => Technology::WIRED.to_vec(),
        Variant::ThreeTech => Technology::ALL.to_vec(),
    };
    let nf = instance.facilities.len();
    let arcs = network_arcs(instance);
    let mut m = Model::new();

    let mut z = BTreeMap::new();
    for f in &instance.facilities {
        for &t in &techs {
            let id = m.add_variable(format!("z_f{}_t{}", f.id, t.number()), VarKind::Binary, 0.0, 1.0)?;
            m.set_cost(id, f.open_cost[t.index()])?;
            z.insert((f.id, t), id);
        }
    }

    let mut x = Vec::with_capacity(arcs.len());
    for arc in &arcs {
        let id = m.add_variable(format!("x_{}_{}", arc.tail, arc.head), VarKind::Binary, 0.0, 1.0)?;
        m.set_cost(id, arc.cost)?;
        x.push(id);
    }

    let mut y = BTreeMap::new();
    for &t in &techs {
        for a in instance.assignment_arcs.get(t) {
            let id = m.add_variable(
                format!("y_f{}_u{}_t{}", a.facility, a.user, t.number()),
                VarKind::Binary,
                0.0,
                1.0,
            )?;
            m.set_cost(id, a.cost)?;
            y.insert((a.facility, a.user, t), id);
        }
    }

    let mut v = BTreeMap::new();
    for u in &instance.users {
        for &t in &techs {
            let id = m.add_variable(format!("v_u{}_t{}", u.id, t.number()), VarKind::Binary, 0.0, 1.0)?;
            v.insert((u.id, t), id);
        }
    }

    let mut phi = Vec::with_capacity(arcs.len());
    for arc in &arcs {
        let mut row = Vec::with_capacity(nf);
        for f in 0..nf {
            let name = format!("phi_{}_{}_f{}", arc.tail, arc.head, f);
            row.push(m.add_variable(name, VarKind::Continuous, 0.0, 1.0)?);
        }
        phi.push(row);
    }

    let mut p = Vec::new();
    if variant == Variant::ThreeTech {
        let w = instance.wireless()?;
        for f in 0..nf {
            p.push(m.add_variable(format!("p_f{f}"), VarKind::Continuous, 0.0, w.p_max)?);
        }
    }

    // Each facility is opened on at most one technology.
    for f in 0..nf {
        let terms = techs.iter().map(|&t| (z[&(f, t)], 1.0)).collect();
        m.add_constraint(LinearConstraint::new(
            format!("{}(f{f})", tags::SINGLE_TECH),
            terms,
            Sense::Le,
            1.0,
        ))?;
    }

    // A user served on t uses exactly one assignment arc of t.
    for u in 0..instance.users.len() {
        for &t in &techs {
            let mut terms: Vec<(VarId, f64)> = instance
                .facilities_of(u, t)
                .into_iter()
                .map(|f| (y[&(f, u, t)], 1.0))
                .collect();
            terms.push((v[&(u, t)], -1.0));
            m.add_constraint(LinearConstraint::new(
                format!("{}(u{u},t{})", tags::ASSIGN, t.number()),
                terms,
                Sense::Eq,
                0.0,
            ))?;
        }
    }

    for (&(f, u, t), &id) in &y {
        m.add_constraint(LinearConstraint::new(
            format!("{}(f{f},u{u},t{})", tags::LINK, t.number()),
            vec![(id, 1.0), (z[&(f, t)], -1.0)],
            Sense::Le,
            0.0,
        ))?;
    }

    // Coverage of t counts users served on t or on any better technology.
    for (k, &t) in techs.iter().enumerate() {
        let mut terms = Vec::new();
        for u in &instance.users {
            if u.weight != 0.0 {
                for &tau in &techs[..=k] {
                    terms.push((v[&(u.id, tau)], u.weight));
                }
            }
        }
        m.add_constraint(LinearConstraint::new(
            format!("{}(t{})", tags::COVER, t.number()),
            terms,
            Sense::Ge,
            instance.threshold(t),
        ))?;
    }

    // One commodity per facility, shipped from the root when it opens.
    let nodes = ConflModel::nodes(instance);
    let mut incident: BTreeMap<NetNode, Vec<(usize, f64)>> = BTreeMap::new();
    for (k, arc) in arcs.iter().enumerate() {
        incident.entry(arc.head).or_default().push((k, 1.0));
        incident.entry(arc.tail).or_default().push((k, -1.0));
    }
    for f in 0..nf {
        let own = NetNode::Core(CoreNode::Facility(f));
        for &node in &nodes {
            let mut terms: Vec<(VarId, f64)> = incident
                .get(&node)
                .map(|list| list.iter().map(|&(k, s)| (phi[k][f], s)).collect())
                .unwrap_or_default();
            let supply = match node {
                NetNode::Root => 1.0,
                n if n == own => -1.0,
                _ => 0.0,
            };
            if supply != 0.0 {
                terms.extend(techs.iter().map(|&t| (z[&(f, t)], supply)));
            } else if terms.is_empty() {
                continue;
            }
            m.add_constraint(LinearConstraint::new(
                format!("{}({node},f{f})", tags::FLOW),
                terms,
                Sense::Eq,
                0.0,
            ))?;
        }
    }
    for (k, arc) in arcs.iter().enumerate() {
        for f in 0..nf {
            m.add_constraint(LinearConstraint::new(
                format!("{}({}-{},f{f})", tags::CAP, arc.tail, arc.head),
                vec![(phi[k][f], 1.0), (x[k], -1.0)],
                Sense::Le,
                0.0,
            ))?;
        }
    }

    let mut sir_rows = BTreeMap::new();
    if variant == Variant::ThreeTech {
        let w = instance.wireless()?;
        let t3 = Technology::Wireless;
        for f in 0..nf {
            let zf = z[&(f, t3)];
            m.add_constraint(LinearConstraint::new(
                format!("{}(f{f})", tags::PMIN),
                vec![(p[f], 1.0), (zf, -w.p_min)],
                Sense::Ge,
                0.0,
            ))?;
            m.add_constraint(LinearConstraint::new(
                format!("{}(f{f})", tags::PMAX),
                vec![(p[f], 1.0), (zf, -w.p_max)],
                Sense::Le,
                0.0,
            ))?;
        }
        for a in instance.assignment_arcs.get(t3) {
            let (f, u) = (a.facility, a.user);
            let big = big_m(instance, f, u)?;
            let mut terms = vec![(p[f], w.fading(f, u))];
            for k in (0..nf).filter(|&k| k != f) {
                let c = w.fading(k, u);
                if c != 0.0 {
                    terms.push((p[k], -w.delta * c));
                }
            }
            terms.push((y[&(f, u, t3)], -big));
            let id = m.add_constraint(LinearConstraint::new(
                format!("{}(f{f},u{u})", tags::SIR),
                terms,
                Sense::Ge,
                w.delta * w.noise - big,
            ))?;
            sir_rows.insert((f, u), id);
        }
    }

    Ok(ConflModel {
        model: m,
        variant,
        techs,
        arcs,
        z,
        x,
        y,
        v,
        phi,
        p,
        sir_rows,
        super_rows: Vec::new(),
        conflict_rows: Vec::new(),
    })
}
