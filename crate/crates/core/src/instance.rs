//! Problem data: users, candidate facilities, central offices, the core
//! graph and the radio parameters of the wireless technology.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;

/// Access technology a facility can be opened on, best first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    /// FTTH, t = 1.
    Fiber,
    /// FTTC / FTTB, t = 2.
    Copper,
    /// FTTA, t = 3.
    Wireless,
}

impl Technology {
    pub const ALL: [Technology; 3] = [Technology::Fiber, Technology::Copper, Technology::Wireless];
    pub const WIRED: [Technology; 2] = [Technology::Fiber, Technology::Copper];

    /// Zero-based position, used to index per-technology arrays.
    pub fn index(self) -> usize {
        self as usize
    }

    /// One-based technology number (1 fiber, 2 copper, 3 wireless).
    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn from_number(t: usize) -> Option<Self> {
        Self::ALL.get(t.checked_sub(1)?).copied()
    }

    /// Lower-case name, as used for JSON keys.
    pub fn key(self) -> &'static str {
        match self {
            Technology::Fiber => "fiber",
            Technology::Copper => "copper",
            Technology::Wireless => "wireless",
        }
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (t={})", self.key(), self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance(self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: usize,
    pub weight: f64,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facility {
    pub id: usize,
    pub position: Position,
    /// Opening cost per technology, indexed by [`Technology::index`].
    pub open_cost: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralOffice {
    pub id: usize,
    pub position: Position,
    pub open_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinerNode {
    pub id: usize,
    pub position: Position,
}

/// Node of the core graph, referenced by position in its own list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreNode {
    Facility(usize),
    CentralOffice(usize),
    Steiner(usize),
}

impl fmt::Display for CoreNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreNode::Facility(i) => write!(f, "f{i}"),
            CoreNode::CentralOffice(i) => write!(f, "c{i}"),
            CoreNode::Steiner(i) => write!(f, "s{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreArc {
    pub tail: CoreNode,
    pub head: CoreNode,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentArc {
    pub facility: usize,
    pub user: usize,
    pub cost: f64,
}

/// Assignment arcs split by technology; the arcs of technology t define
/// the sets F_u^t and U_f^t.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AssignmentArcs {
    pub fiber: Vec<AssignmentArc>,
    pub copper: Vec<AssignmentArc>,
    pub wireless: Vec<AssignmentArc>,
}

impl AssignmentArcs {
    pub fn get(&self, t: Technology) -> &[AssignmentArc] {
        match t {
            Technology::Fiber => &self.fiber,
            Technology::Copper => &self.copper,
            Technology::Wireless => &self.wireless,
        }
    }

    pub fn get_mut(&mut self, t: Technology) -> &mut Vec<AssignmentArc> {
        match t {
            Technology::Fiber => &mut self.fiber,
            Technology::Copper => &mut self.copper,
            Technology::Wireless => &mut self.wireless,
        }
    }
}

/// Radio parameters for the wireless technology. Powers are in linear
/// units; `delta` is the linear SIR threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wireless {
    pub p_min: f64,
    pub p_max: f64,
    pub delta: f64,
    pub noise: f64,
    /// `fading[f][u]`: share of the power of facility f received by user u.
    pub fading: Vec<Vec<f64>>,
}

impl Wireless {
    pub fn fading(&self, facility: usize, user: usize) -> f64 {
        self.fading[facility][user]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub meta: Meta,
    pub users: Vec<User>,
    pub facilities: Vec<Facility>,
    pub central_offices: Vec<CentralOffice>,
    pub steiner_nodes: Vec<SteinerNode>,
    pub core_arcs: Vec<CoreArc>,
    pub assignment_arcs: AssignmentArcs,
    /// Coverage requirement W_t per technology.
    pub coverage_thresholds: [f64; 3],
    /// Required in documents; `null` for instances without a wireless layer.
    #[serde(deserialize_with = "Option::deserialize")]
    pub wireless: Option<Wireless>,
}

impl Instance {
    pub fn total_weight(&self) -> f64 {
        self.users.iter().map(|u| u.weight).sum()
    }

    pub fn threshold(&self, t: Technology) -> f64 {
        self.coverage_thresholds[t.index()]
    }

    /// U_f^t as user indices, in arc order.
    pub fn users_of(&self, facility: usize, t: Technology) -> Vec<usize> {
        self.assignment_arcs
            .get(t)
            .iter()
            .filter(|a| a.facility == facility)
            .map(|a| a.user)
            .collect()
    }

    /// F_u^t as facility indices, in arc order.
    pub fn facilities_of(&self, user: usize, t: Technology) -> Vec<usize> {
        self.assignment_arcs
            .get(t)
            .iter()
            .filter(|a| a.user == user)
            .map(|a| a.facility)
            .collect()
    }

    /// W^POT_ft: weight of users facility f could serve on technology t.
    pub fn potential_weight(&self, facility: usize, t: Technology) -> f64 {
        self.assignment_arcs
            .get(t)
            .iter()
            .filter(|a| a.facility == facility)
            .map(|a| self.users[a.user].weight)
            .sum()
    }

    pub fn wireless(&self) -> Result<&Wireless, InstanceError> {
        self.wireless.as_ref().ok_or(InstanceError::MissingWireless)
    }

    /// Checks every structural and numeric invariant of the data.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let nf = self.facilities.len();
        let nu = self.users.len();
        for (i, u) in self.users.iter().enumerate() {
            check_id("users", i, u.id)?;
            nonneg(&format!("users[{i}].weight"), u.weight)?;
        }
        for (i, f) in self.facilities.iter().enumerate() {
            check_id("facilities", i, f.id)?;
            for (t, c) in f.open_cost.iter().enumerate() {
                nonneg(&format!("facilities[{i}].open_cost[{t}]"), *c)?;
            }
        }
        for (i, c) in self.central_offices.iter().enumerate() {
            check_id("central_offices", i, c.id)?;
            nonneg(&format!("central_offices[{i}].open_cost"), c.open_cost)?;
        }
        for (i, s) in self.steiner_nodes.iter().enumerate() {
            check_id("steiner_nodes", i, s.id)?;
        }
        let mut arcs_seen = std::collections::HashSet::new();
        for (k, arc) in self.core_arcs.iter().enumerate() {
            for (end, node) in [("tail", arc.tail), ("head", arc.head)] {
                let ok = match node {
                    CoreNode::Facility(i) => i < nf,
                    CoreNode::CentralOffice(i) => i < self.central_offices.len(),
                    CoreNode::Steiner(i) => i < self.steiner_nodes.len(),
                };
                if !ok {
                    return Err(invalid(format!("core_arcs[{k}].{end}"), format!("unknown node {node}")));
                }
            }
            if arc.tail == arc.head {
                return Err(invalid(format!("core_arcs[{k}]"), "self-loop".into()));
            }
            if !arcs_seen.insert((arc.tail, arc.head)) {
                return Err(invalid(format!("core_arcs[{k}]"), "duplicate arc".into()));
            }
            nonneg(&format!("core_arcs[{k}].cost"), arc.cost)?;
        }
        for t in Technology::ALL {
            let key = t.key();
            let mut seen = std::collections::HashSet::new();
            for (k, arc) in self.assignment_arcs.get(t).iter().enumerate() {
                let path = format!("assignment_arcs.{key}[{k}]");
                if arc.facility >= nf {
                    return Err(invalid(path, format!("unknown facility {}", arc.facility)));
                }
                if arc.user >= nu {
                    return Err(invalid(path, format!("unknown user {}", arc.user)));
                }
                if !seen.insert((arc.facility, arc.user)) {
                    return Err(invalid(path, "duplicate facility-user pair".into()));
                }
                nonneg(&format!("{path}.cost"), arc.cost)?;
            }
        }
        let total = self.total_weight();
        for (t, &w) in self.coverage_thresholds.iter().enumerate() {
            let path = format!("coverage_thresholds[{t}]");
            nonneg(&path, w)?;
            if w > total + 1e-9 {
                return Err(invalid(path, format!("{w} exceeds the total user weight {total}")));
            }
        }
        if self.coverage_thresholds[0] > self.coverage_thresholds[1] {
            return Err(invalid(
                "coverage_thresholds".into(),
                "fiber threshold W_1 must not exceed copper threshold W_2".into(),
            ));
        }
        if let Some(w) = &self.wireless {
            nonneg("wireless.p_min", w.p_min)?;
            if !(w.p_max.is_finite() && w.p_min <= w.p_max) {
                return Err(invalid("wireless.p_max".into(), "needs p_min <= p_max".into()));
            }
            for (name, v) in [("delta", w.delta), ("noise", w.noise)] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(format!("wireless.{name}"), format!("{v} must be positive")));
                }
            }
            if w.fading.len() != nf {
                return Err(invalid(
                    "wireless.fading".into(),
                    format!("expected {nf} rows (one per facility), found {}", w.fading.len()),
                ));
            }
            for (f, row) in w.fading.iter().enumerate() {
                if row.len() != nu {
                    return Err(invalid(
                        format!("wireless.fading[{f}]"),
                        format!("expected {nu} entries (one per user), found {}", row.len()),
                    ));
                }
                for (u, &a) in row.iter().enumerate() {
                    if !(0.0..=1.0).contains(&a) {
                        return Err(invalid(
                            format!("wireless.fading[{f}][{u}]"),
                            format!("fading coefficient {a} outside [0, 1]"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn invalid(path: String, message: String) -> InstanceError {
    InstanceError::Invalid { path, message }
}

fn check_id(list: &str, pos: usize, id: usize) -> Result<(), InstanceError> {
    if pos != id {
        return Err(invalid(
            format!("{list}[{pos}].id"),
            format!("ids must equal list positions, found {id}"),
        ));
    }
    Ok(())
}

fn nonneg(path: &str, v: f64) -> Result<(), InstanceError> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(invalid(path.into(), format!("{v} must be finite and nonnegative")));
    }
    Ok(())
}
