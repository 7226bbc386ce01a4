//! Shared helpers: tiny random instances and the exhaustive oracle.
#![allow(dead_code)]

use std::collections::BTreeMap;

use confl_core::instance::*;
use confl_milp::{solve_lp, Assignment, LpStatus, Model, Sense, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn binaries(model: &Model) -> usize {
    model.binaries().count()
}

fn pos(rng: &mut ChaCha8Rng) -> Position {
    Position::new(rng.gen_range(0.0..6.0f64).round(), rng.gen_range(0.0..6.0f64).round())
}

/// Random instance small enough for full enumeration (at most 18 binaries).
///
/// Shapes: 2 facilities with 1 or 2 users, or 3 facilities with 1 user;
/// one central office. Every W_t is reachable by the facilities' potential
/// coverage on t.
pub fn tiny_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nf, nu) = match rng.gen_range(0..3) {
        0 => (2, 1),
        1 => (2, 2),
        _ => (3, 1),
    };
    // Budget left for x and y after z (3F) and v (3U).
    let budget = 18 - 3 * nf - 3 * nu;

    let users: Vec<User> = (0..nu)
        .map(|id| User { id, weight: rng.gen_range(1..=3) as f64, position: pos(&mut rng) })
        .collect();
    let facilities: Vec<Facility> = (0..nf)
        .map(|id| Facility {
            id,
            position: pos(&mut rng),
            open_cost: [rng.gen_range(4..=9) as f64, rng.gen_range(2..=6) as f64, rng.gen_range(1..=4) as f64],
        })
        .collect();
    let central_offices = vec![CentralOffice { id: 0, position: pos(&mut rng), open_cost: rng.gen_range(1..=5) as f64 }];

    // Office -> every facility, plus one facility-facility arc if affordable.
    let mut core_arcs: Vec<CoreArc> = (0..nf)
        .map(|f| CoreArc {
            tail: CoreNode::CentralOffice(0),
            head: CoreNode::Facility(f),
            cost: rng.gen_range(1..=6) as f64,
        })
        .collect();
    let mut used = 1 + core_arcs.len();
    if budget - used >= 3 && rng.gen_bool(0.5) {
        core_arcs.push(CoreArc { tail: CoreNode::Facility(0), head: CoreNode::Facility(1), cost: 1.0 });
        used += 1;
    }

    let mut pairs: Vec<(Technology, usize, usize)> = Vec::new();
    for t in Technology::ALL {
        for f in 0..nf {
            for u in 0..nu {
                pairs.push((t, f, u));
            }
        }
    }
    // Partial shuffle, then keep as many arcs as the budget allows.
    for i in 0..pairs.len() {
        let j = rng.gen_range(i..pairs.len());
        pairs.swap(i, j);
    }
    let keep = (budget - used).min(pairs.len());
    let mut kept = pairs[..keep].to_vec();
    kept.sort();
    let mut assignment_arcs = AssignmentArcs::default();
    for (t, f, u) in kept {
        assignment_arcs.get_mut(t).push(AssignmentArc { facility: f, user: u, cost: rng.gen_range(0..=3) as f64 });
    }

    let fading: Vec<Vec<f64>> = (0..nf)
        .map(|_| (0..nu).map(|_| (rng.gen_range(0.0..1.0f64) * 20.0).round() / 20.0).collect())
        .collect();
    let wireless = Wireless {
        p_min: [0.0, 0.1, 0.2][rng.gen_range(0..3)],
        p_max: 1.0,
        delta: [1.0, 2.0][rng.gen_range(0..2)],
        noise: [0.05, 0.1][rng.gen_range(0..2)],
        fading,
    };

    let mut inst = Instance {
        meta: Meta { name: format!("tiny-{seed}"), seed: Some(seed), description: None },
        users,
        facilities,
        central_offices,
        steiner_nodes: vec![],
        core_arcs,
        assignment_arcs,
        coverage_thresholds: [0.0; 3],
        wireless: Some(wireless),
    };
    let potential = |t: Technology| -> f64 { (0..nf).map(|f| inst.potential_weight(f, t)).sum() };
    let reach = Technology::ALL.map(potential);
    let total = inst.total_weight();
    let mut w = [0.0; 3];
    for t in 0..3 {
        let share = [0.0, 0.5, 1.0, 1.0][rng.gen_range(0..4)];
        w[t] = (share * reach[t].min(total)).floor().max(0.0);
    }
    w[0] = w[0].min(w[1]);
    if w.iter().all(|&x| x == 0.0) {
        // Ask for something whenever any technology reaches a user.
        if let Some(t) = (0..3).rev().find(|&t| reach[t] > 0.0) {
            w[t] = reach[t].min(total).floor();
            w[0] = w[0].min(w[1]);
        }
    }
    inst.coverage_thresholds = w;
    inst.validate().expect("tiny instance is valid");
    inst
}

/// Exact optimum of a MILP by enumerating every binary vector and solving
/// the remaining LP. Rows over binaries only are screened first, and vectors
/// whose binary cost cannot beat the best value are skipped.
pub fn enumerate_optimum(model: &Model) -> Option<(f64, Assignment)> {
    let bins: Vec<VarId> = model.binaries().collect();
    assert!(bins.len() <= 20, "{} binaries is too many to enumerate", bins.len());
    let pos: BTreeMap<VarId, usize> = bins.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let binary_rows: Vec<_> = model
        .constraints()
        .iter()
        .filter(|c| c.terms.iter().all(|(v, _)| pos.contains_key(v)))
        .collect();
    let costs = model.costs();
    let continuous_cost = model
        .objective_terms()
        .any(|(v, _)| !pos.contains_key(&v));
    let mut best: Option<(f64, Assignment)> = None;
    let mut vals = vec![0.0; model.num_variables()];
    for mask in 0u32..(1 << bins.len()) {
        for (k, &v) in bins.iter().enumerate() {
            vals[v.0] = ((mask >> k) & 1) as f64;
        }
        let ok = binary_rows.iter().all(|c| {
            let a = c.activity(&vals);
            match c.sense {
                Sense::Le => a <= c.rhs + 1e-9,
                Sense::Ge => a >= c.rhs - 1e-9,
                Sense::Eq => (a - c.rhs).abs() <= 1e-9,
            }
        });
        if !ok {
            continue;
        }
        let fixed_cost: f64 = bins.iter().map(|v| costs[v.0] * vals[v.0]).sum();
        if !continuous_cost {
            if let Some((b, _)) = &best {
                if fixed_cost >= *b - 1e-9 {
                    continue;
                }
            }
        }
        let fixings = bins.iter().map(|&v| (v, vals[v.0])).collect();
        let lp = model.apply_fixings(&fixings).unwrap().lp_relaxation();
        let r = solve_lp(&lp).unwrap();
        if r.status == LpStatus::Optimal && best.as_ref().map_or(true, |(b, _)| r.objective < *b - 1e-9) {
            best = Some((r.objective, r.assignment.unwrap()));
        }
    }
    best
}

/// Every integer-feasible binary vector with its continuous completion.
pub fn feasible_points(model: &Model) -> Vec<Assignment> {
    let bins: Vec<VarId> = model.binaries().collect();
    assert!(bins.len() <= 20);
    let pos: BTreeMap<VarId, usize> = bins.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let binary_rows: Vec<_> = model
        .constraints()
        .iter()
        .filter(|c| c.terms.iter().all(|(v, _)| pos.contains_key(v)))
        .collect();
    let mut out = Vec::new();
    let mut vals = vec![0.0; model.num_variables()];
    for mask in 0u32..(1 << bins.len()) {
        for (k, &v) in bins.iter().enumerate() {
            vals[v.0] = ((mask >> k) & 1) as f64;
        }
        // Cheap screen before the LP.
        if binary_rows.iter().any(|c| c.violation(&vals) > 1e-9) {
            continue;
        }
        let fixings = bins.iter().map(|&v| (v, vals[v.0])).collect();
        let r = solve_lp(&model.apply_fixings(&fixings).unwrap().lp_relaxation()).unwrap();
        if r.status == LpStatus::Optimal {
            out.push(r.assignment.unwrap());
        }
    }
    out
}

/// One facility, one office, one user reachable on fiber only. The optimum
/// opens the office, the facility on fiber, the core arc and the fiber arc.
pub fn single_path() -> Instance {
    Instance {
        meta: Meta { name: "single".into(), ..Meta::default() },
        users: vec![User { id: 0, weight: 1.0, position: Position::new(0.0, 0.0) }],
        facilities: vec![Facility { id: 0, position: Position::new(1.0, 0.0), open_cost: [5.0, 3.0, 2.0] }],
        central_offices: vec![CentralOffice { id: 0, position: Position::new(2.0, 0.0), open_cost: 7.0 }],
        steiner_nodes: vec![],
        core_arcs: vec![CoreArc { tail: CoreNode::CentralOffice(0), head: CoreNode::Facility(0), cost: 4.0 }],
        assignment_arcs: AssignmentArcs {
            fiber: vec![AssignmentArc { facility: 0, user: 0, cost: 1.5 }],
            ..AssignmentArcs::default()
        },
        coverage_thresholds: [1.0, 1.0, 0.0],
        wireless: Some(Wireless { p_min: 0.1, p_max: 1.0, delta: 2.0, noise: 0.05, fading: vec![vec![0.5]] }),
    }
}

/// Two wireless facilities each serving their own user with full symmetric
/// cross-fading 0.5 (δ = 2, η = 0.1, P in [0.1, 1]): the two assignments
/// conflict. W_3 = 2 needs the third facility, which reaches user 1 only and
/// only while facility 1 stays silent.
pub fn conflict_instance() -> Instance {
    let users = (0..2).map(|id| User { id, weight: 1.0, position: Position::new(id as f64 * 4.0, 0.0) }).collect();
    let facilities = (0..3)
        .map(|id| Facility { id, position: Position::new(id as f64 * 2.0, 1.0), open_cost: [9.0, 9.0, 1.0 + id as f64] })
        .collect();
    let core_arcs = (0..3)
        .map(|f| CoreArc { tail: CoreNode::CentralOffice(0), head: CoreNode::Facility(f), cost: 1.0 })
        .collect();
    let wireless = vec![
        AssignmentArc { facility: 0, user: 0, cost: 0.0 },
        AssignmentArc { facility: 1, user: 1, cost: 0.0 },
        AssignmentArc { facility: 2, user: 1, cost: 0.0 },
    ];
    Instance {
        meta: Meta { name: "conflict".into(), ..Meta::default() },
        users,
        facilities,
        central_offices: vec![CentralOffice { id: 0, position: Position::new(2.0, 3.0), open_cost: 1.0 }],
        steiner_nodes: vec![],
        core_arcs,
        assignment_arcs: AssignmentArcs { wireless, ..AssignmentArcs::default() },
        coverage_thresholds: [0.0, 0.0, 2.0],
        wireless: Some(Wireless {
            p_min: 0.1,
            p_max: 1.0,
            delta: 2.0,
            noise: 0.1,
            fading: vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.0, 0.6]],
        }),
    }
}

/// Generator settings for instances the dense solver handles in seconds.
pub fn small_params() -> confl_core::io::GeneratorParams {
    confl_core::io::GeneratorParams {
        grid_width: 4,
        grid_height: 3,
        n_facilities: 4,
        n_central_offices: 1,
        n_steiner: 1,
        k_nearest: 2,
        radius: [1.0, 1.5, 2.0],
        ..Default::default()
    }
}

/// Reference and heuristic gaps of fifteen instances with the printed ΔGap.
pub const GAP_TABLE: [(&str, f64, f64, f64); 15] = [
    ("I1", 148.57, 131.23, -11.67),
    ("I2", 136.74, 106.16, -22.36),
    ("I3", 99.46, 72.96, -26.64),
    ("I4", 156.47, 123.73, -20.92),
    ("I5", 78.86, 49.98, -36.62),
    ("I6", 93.42, 64.04, -31.44),
    ("I7", 117.00, 82.05, -29.48),
    ("I8", 95.21, 59.73, -37.26),
    ("I9", 178.94, 119.62, -33.15),
    ("I10", 98.80, 77.66, -21.39),
    ("I11", 89.13, 66.17, -25.76),
    ("I12", 104.11, 71.23, -31.58),
    ("I13", 95.20, 52.08, -45.29),
    ("I14", 112.44, 82.48, -26.64),
    ("I15", 103.00, 74.30, -27.86),
];
