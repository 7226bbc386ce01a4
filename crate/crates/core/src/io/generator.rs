//! Random testpoint-grid instances.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::InstanceError;
use crate::instance::*;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorParams {
    pub grid_width: usize,
    pub grid_height: usize,
    pub n_facilities: usize,
    pub n_central_offices: usize,
    pub n_steiner: usize,
    /// Probability that a pixel holds a user.
    pub user_density: f64,
    pub user_weight: f64,
    /// Opening cost range per technology.
    pub facility_cost: [(f64, f64); 3],
    pub office_cost: (f64, f64),
    /// Core arc cost per unit of length.
    pub core_cost_per_unit: f64,
    /// Assignment arc cost per unit of length, per technology.
    pub assignment_cost_per_unit: [f64; 3],
    /// Reach of each technology, in pixels.
    pub radius: [f64; 3],
    /// Core arcs to the k nearest core nodes.
    pub k_nearest: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub delta: f64,
    pub noise: f64,
    pub path_loss: f64,
    pub reference_distance: f64,
    /// W_t as a share of the total user weight.
    pub coverage_fractions: [f64; 3],
    pub max_attempts: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            grid_width: 25,
            grid_height: 18,
            n_facilities: 30,
            n_central_offices: 5,
            n_steiner: 10,
            user_density: 1.0,
            user_weight: 1.0,
            facility_cost: [(40.0, 60.0), (20.0, 30.0), (10.0, 15.0)],
            office_cost: (80.0, 120.0),
            core_cost_per_unit: 3.0,
            assignment_cost_per_unit: [1.0, 0.5, 0.1],
            radius: [4.0, 6.0, 8.0],
            k_nearest: 4,
            p_min: 0.1,
            p_max: 1.0,
            delta: 2.0,
            noise: 0.05,
            path_loss: 3.0,
            reference_distance: 1.0,
            coverage_fractions: [0.2, 0.4, 0.2],
            max_attempts: 50,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), InstanceError> {
        let bad = |m: String| Err(InstanceError::Params(m));
        if self.grid_width == 0 || self.grid_height == 0 {
            return bad("grid must have at least one pixel".into());
        }
        if self.n_facilities == 0 || self.n_central_offices == 0 {
            return bad("need at least one facility and one central office".into());
        }
        let points = (self.grid_width + 1) * (self.grid_height + 1);
        if self.n_facilities + self.n_central_offices + self.n_steiner > points {
            return bad(format!("{points} grid points cannot hold every core node"));
        }
        if !(0.0..=1.0).contains(&self.user_density) || !(self.user_weight > 0.0) {
            return bad("user density must lie in [0, 1] and weights must be positive".into());
        }
        let ranges = self.facility_cost.iter().chain([&self.office_cost]);
        for &(lo, hi) in ranges {
            if !(lo >= 0.0 && lo <= hi) {
                return bad(format!("invalid cost range [{lo}, {hi}]"));
            }
        }
        if self.k_nearest == 0 || self.radius.iter().any(|r| !(*r > 0.0)) {
            return bad("k_nearest and radii must be positive".into());
        }
        if !(0.0 <= self.p_min && self.p_min <= self.p_max && self.delta > 0.0 && self.noise > 0.0) {
            return bad("need 0 <= p_min <= p_max, delta > 0 and noise > 0".into());
        }
        if !(self.path_loss > 0.0 && self.reference_distance > 0.0) {
            return bad("path-loss exponent and reference distance must be positive".into());
        }
        let fr = self.coverage_fractions;
        if fr.iter().any(|x| !(0.0..=1.0).contains(x)) || fr[0] > fr[1] {
            return bad("coverage fractions must lie in [0, 1] with fiber <= copper".into());
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive".into());
        }
        Ok(())
    }
}

/// a = min(1, (d0 / d)^γ).
pub fn fading(distance: f64, reference: f64, exponent: f64) -> f64 {
    if distance <= reference {
        1.0
    } else {
        (reference / distance).powf(exponent).min(1.0)
    }
}

/// Draws an instance; a pure function of `(params, seed)`.
///
/// Users sit at pixel centers, core nodes at distinct grid corners. If some
/// W_t cannot be reached by the facilities' potential coverage, the
/// placement is drawn again.
pub fn generate(params: &GeneratorParams, seed: u64) -> Result<Instance, InstanceError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = Technology::Fiber;
    for attempt in 0..params.max_attempts {
        let inst = draw(params, seed, &mut rng);
        match unattainable(&inst) {
            None => {
                inst.validate()?;
                return Ok(inst);
            }
            Some(t) => {
                log::debug!("attempt {attempt}: {t} threshold unattainable, redrawing");
                last = t;
            }
        }
    }
    Err(InstanceError::Unattainable { technology: last, attempts: params.max_attempts })
}

fn unattainable(inst: &Instance) -> Option<Technology> {
    Technology::ALL.into_iter().find(|&t| {
        let total: f64 = (0..inst.facilities.len()).map(|f| inst.potential_weight(f, t)).sum();
        total < inst.threshold(t)
    })
}

fn draw(p: &GeneratorParams, seed: u64, rng: &mut ChaCha8Rng) -> Instance {
    let mut users = Vec::new();
    for y in 0..p.grid_height {
        for x in 0..p.grid_width {
            if p.user_density >= 1.0 || rng.gen::<f64>() < p.user_density {
                users.push(User {
                    id: users.len(),
                    weight: p.user_weight,
                    position: Position::new(x as f64 + 0.5, y as f64 + 0.5),
                });
            }
        }
    }

    let mut corners: Vec<Position> = (0..=p.grid_height)
        .flat_map(|y| (0..=p.grid_width).map(move |x| Position::new(x as f64, y as f64)))
        .collect();
    corners.shuffle(rng);
    let mut corners = corners.into_iter();
    let mut uniform = |(lo, hi): (f64, f64)| if hi > lo { rng.gen_range(lo..=hi) } else { lo };

    let facilities: Vec<Facility> = (0..p.n_facilities)
        .map(|id| Facility {
            id,
            position: corners.next().unwrap(),
            open_cost: [
                uniform(p.facility_cost[0]),
                uniform(p.facility_cost[1]),
                uniform(p.facility_cost[2]),
            ],
        })
        .collect();
    let central_offices: Vec<CentralOffice> = (0..p.n_central_offices)
        .map(|id| CentralOffice { id, position: corners.next().unwrap(), open_cost: uniform(p.office_cost) })
        .collect();
    let steiner_nodes: Vec<SteinerNode> = (0..p.n_steiner)
        .map(|id| SteinerNode { id, position: corners.next().unwrap() })
        .collect();

    let mut nodes: Vec<(CoreNode, Position)> = Vec::new();
    nodes.extend(facilities.iter().map(|f| (CoreNode::Facility(f.id), f.position)));
    nodes.extend(central_offices.iter().map(|c| (CoreNode::CentralOffice(c.id), c.position)));
    nodes.extend(steiner_nodes.iter().map(|s| (CoreNode::Steiner(s.id), s.position)));

    // Undirected links, stored as ordered index pairs; each becomes two arcs.
    let mut links = BTreeSet::new();
    for (i, &(_, pi)) in nodes.iter().enumerate() {
        let mut others: Vec<usize> = (0..nodes.len()).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| pi.distance(nodes[a].1).total_cmp(&pi.distance(nodes[b].1)).then(a.cmp(&b)));
        for &j in others.iter().take(p.k_nearest) {
            links.insert((i.min(j), i.max(j)));
        }
    }
    let office_base = facilities.len();
    for (i, f) in facilities.iter().enumerate() {
        let nearest = (0..central_offices.len())
            .min_by(|&a, &b| {
                f.position
                    .distance(central_offices[a].position)
                    .total_cmp(&f.position.distance(central_offices[b].position))
            })
            .unwrap();
        links.insert((i, office_base + nearest));
    }
    let mut core_arcs = Vec::with_capacity(2 * links.len());
    for (i, j) in links {
        let cost = p.core_cost_per_unit * nodes[i].1.distance(nodes[j].1);
        core_arcs.push(CoreArc { tail: nodes[i].0, head: nodes[j].0, cost });
        core_arcs.push(CoreArc { tail: nodes[j].0, head: nodes[i].0, cost });
    }

    let mut assignment_arcs = AssignmentArcs::default();
    for t in Technology::ALL {
        let arcs = assignment_arcs.get_mut(t);
        for f in &facilities {
            for u in &users {
                let d = f.position.distance(u.position);
                if d <= p.radius[t.index()] {
                    arcs.push(AssignmentArc {
                        facility: f.id,
                        user: u.id,
                        cost: p.assignment_cost_per_unit[t.index()] * d,
                    });
                }
            }
        }
    }

    let fading_rows = facilities
        .iter()
        .map(|f| {
            users
                .iter()
                .map(|u| fading(f.position.distance(u.position), p.reference_distance, p.path_loss))
                .collect()
        })
        .collect();

    let total: f64 = users.iter().map(|u| u.weight).sum();
    let mut coverage_thresholds = p.coverage_fractions.map(|fr| fr * total);
    // Keep W_1 <= W_2 exact despite rounding.
    coverage_thresholds[0] = coverage_thresholds[0].min(coverage_thresholds[1]);

    Instance {
        meta: Meta {
            name: format!("grid{}x{}-f{}-s{seed}", p.grid_width, p.grid_height, p.n_facilities),
            seed: Some(seed),
            description: None,
        },
        users,
        facilities,
        central_offices,
        steiner_nodes,
        core_arcs,
        assignment_arcs,
        coverage_thresholds,
        wireless: Some(Wireless {
            p_min: p.p_min,
            p_max: p.p_max,
            delta: p.delta,
            noise: p.noise,
            fading: fading_rows,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_shape() {
        let inst = generate(&GeneratorParams::default(), 1).unwrap();
        assert_eq!(inst.facilities.len(), 30);
        assert_eq!(inst.central_offices.len(), 5);
        assert_eq!(inst.users.len(), 450);
        assert_eq!(inst, generate(&GeneratorParams::default(), 1).unwrap());
        assert_ne!(inst, generate(&GeneratorParams::default(), 2).unwrap());
    }

    #[test]
    fn fading_cap() {
        assert_eq!(fading(0.0, 1.0, 3.0), 1.0);
        assert_eq!(fading(1.0, 1.0, 3.0), 1.0);
        assert!((fading(2.0, 1.0, 3.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn unattainable_reported() {
        let params = GeneratorParams {
            grid_width: 6,
            grid_height: 6,
            n_facilities: 1,
            n_central_offices: 1,
            n_steiner: 0,
            radius: [0.5, 0.8, 1.0],
            coverage_fractions: [0.9, 0.9, 0.0],
            max_attempts: 3,
            ..GeneratorParams::default()
        };
        assert!(matches!(generate(&params, 4), Err(InstanceError::Unattainable { attempts: 3, .. })));
    }

    #[test]
    fn bad_params_rejected() {
        let params = GeneratorParams { coverage_fractions: [0.5, 0.4, 0.0], ..GeneratorParams::default() };
        assert!(matches!(generate(&params, 1), Err(InstanceError::Params(_))));
    }
}
