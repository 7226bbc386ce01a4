//! Valid inequalities for the wireless layer: superinterferer rows and
//! pairwise SIR conflicts.

use std::collections::BTreeSet;

use confl_milp::{LinearConstraint, Sense};
use rayon::prelude::*;

use crate::error::BuildError;
use crate::formulation::{tags, ConflModel, Variant};
use crate::instance::{Instance, Technology, Wireless};

/// Two (facility, user) wireless assignments that cannot both be active.
/// Normalized so that `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConflictPair {
    pub first: (usize, usize),
    pub second: (usize, usize),
}

/// Facilities k ≠ f that alone deny u service from f, even with k at P_min
/// and f at P_max.
pub fn superinterferers(instance: &Instance, u: usize, f: usize) -> Result<BTreeSet<usize>, BuildError> {
    let w = instance.wireless()?;
    let best = w.fading(f, u) * w.p_max;
    Ok((0..instance.facilities.len())
        .filter(|&k| k != f && best - w.delta * w.fading(k, u) * w.p_min < w.delta * w.noise)
        .collect())
}

/// All pairs of wireless assignments on distinct facilities whose two SIR
/// inequalities have no common solution in the power box.
pub fn conflict_pairs(instance: &Instance) -> Result<Vec<ConflictPair>, BuildError> {
    let w = instance.wireless()?;
    let nf = instance.facilities.len();
    let served: Vec<Vec<usize>> = (0..nf).map(|f| instance.users_of(f, Technology::Wireless)).collect();
    let mut pairs: Vec<ConflictPair> = (0..nf)
        .into_par_iter()
        .flat_map_iter(|f1| {
            let mut found = Vec::new();
            for f2 in f1 + 1..nf {
                for &u1 in &served[f1] {
                    for &u2 in &served[f2] {
                        if !pair_feasible(w, (f1, u1), (f2, u2)) {
                            found.push(ConflictPair { first: (f1, u1), second: (f2, u2) });
                        }
                    }
                }
            }
            found
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    Ok(pairs)
}

/// Exact feasibility of
///   a11 p1 − δ a21 p2 ≥ δη,   a22 p2 − δ a12 p1 ≥ δη,   p1, p2 ∈ [P_min, P_max]
/// where aij is the fading from facility i to the user of assignment j.
///
/// The region is a bounded convex polygon, so it is nonempty iff one of the
/// pairwise intersections of its six boundary lines satisfies every
/// inequality. Near-feasible points count as feasible.
fn pair_feasible(w: &Wireless, (f1, u1): (usize, usize), (f2, u2): (usize, usize)) -> bool {
    let rhs = w.delta * w.noise;
    // Each line is a·p >= b.
    let lines: [([f64; 2], f64); 6] = [
        ([w.fading(f1, u1), -w.delta * w.fading(f2, u1)], rhs),
        ([-w.delta * w.fading(f1, u2), w.fading(f2, u2)], rhs),
        ([1.0, 0.0], w.p_min),
        ([-1.0, 0.0], -w.p_max),
        ([0.0, 1.0], w.p_min),
        ([0.0, -1.0], -w.p_max),
    ];
    let tol = 1e-6 * (1.0 + rhs.abs().max(w.p_max));
    let inside = |p: [f64; 2]| lines.iter().all(|(a, b)| a[0] * p[0] + a[1] * p[1] >= b - tol);
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let ([a, b], e) = lines[i];
            let ([c, d], g) = lines[j];
            let det = a * d - b * c;
            if det.abs() < 1e-14 {
                continue;
            }
            let p = [(e * d - b * g) / det, (a * g - e * c) / det];
            if inside(p) {
                return true;
            }
        }
    }
    false
}

/// Adds y_fu^3 + z_k^3 ≤ 1 for every superinterferer k of (f, u) and
/// y_{f1u1}^3 + y_{f2u2}^3 ≤ 1 for every conflict pair.
pub fn strengthen(confl: &ConflModel, instance: &Instance) -> Result<ConflModel, BuildError> {
    assert_eq!(confl.variant, Variant::ThreeTech, "only the three-technology model can be strengthened");
    let t3 = Technology::Wireless;
    let mut out = confl.clone();
    for a in instance.assignment_arcs.get(t3) {
        let (f, u) = (a.facility, a.user);
        let y = confl.y[&(f, u, t3)];
        for k in superinterferers(instance, u, f)? {
            let id = out.model.add_constraint(LinearConstraint::new(
                format!("{}(f{f},u{u},k{k})", tags::SUPER),
                vec![(y, 1.0), (confl.z_var(k, t3), 1.0)],
                Sense::Le,
                1.0,
            ))?;
            out.super_rows.push(id);
        }
    }
    for pair in conflict_pairs(instance)? {
        let (f1, u1) = pair.first;
        let (f2, u2) = pair.second;
        let id = out.model.add_constraint(LinearConstraint::new(
            format!("{}(f{f1},u{u1};f{f2},u{u2})", tags::CONF),
            vec![(confl.y[&(f1, u1, t3)], 1.0), (confl.y[&(f2, u2, t3)], 1.0)],
            Sense::Le,
            1.0,
        ))?;
        out.conflict_rows.push(id);
    }
    log::debug!(
        "strengthened with {} superinterferer and {} conflict rows",
        out.super_rows.len(),
        out.conflict_rows.len()
    );
    Ok(out)
}
