use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::HeuristicError;
use crate::formulation::ConflModel;
use crate::instance::{Instance, Technology};

use super::attractiveness::{fixing_probabilities, posterior_attractiveness, AttractivenessTable};
use super::params::HeuristicParams;

/// Facility opening state: facilities mapped to the one technology they
/// are opened on.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Fos {
    open: BTreeMap<usize, Technology>,
}

impl Fos {
    pub fn new() -> Self {
        Fos::default()
    }

    /// Adds (f, t); fails if f is already open on another technology.
    pub fn insert(&mut self, f: usize, t: Technology) -> Result<(), HeuristicError> {
        match self.open.get(&f) {
            Some(&existing) if existing != t => Err(HeuristicError::Clash { facility: f, existing, new: t }),
            _ => {
                self.open.insert(f, t);
                Ok(())
            }
        }
    }

    pub fn contains(&self, f: usize, t: Technology) -> bool {
        self.open.get(&f) == Some(&t)
    }

    pub fn technology_of(&self, f: usize) -> Option<Technology> {
        self.open.get(&f).copied()
    }

    /// Entries sorted by facility.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Technology)> + '_ {
        self.open.iter().map(|(&f, &t)| (f, t))
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }
}

impl FromIterator<(usize, Technology)> for Fos {
    /// Later entries win on clashes; use [`Fos::insert`] to detect them.
    fn from_iter<I: IntoIterator<Item = (usize, Technology)>>(iter: I) -> Self {
        Fos { open: iter.into_iter().collect() }
    }
}

impl Serialize for Fos {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.entries().map(|(f, t)| format!("f{f}:t{}", t.number())))
    }
}

/// True when the potential weight of the FOS facilities on t reaches W_t.
/// A user reachable from several of them is counted once per facility.
pub fn is_complete(fos: &Fos, instance: &Instance, t: Technology) -> bool {
    let potential: f64 = fos
        .entries()
        .filter(|&(_, s)| s == t)
        .map(|(f, _)| instance.potential_weight(f, t))
        .sum();
    potential >= instance.threshold(t)
}

/// Draws an index from `probs` with one uniform variate.
pub fn sample_index<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return i;
        }
    }
    // Rounding left the cumulative sum just below 1.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Builds a complete FOS technology by technology (fiber, copper, wireless),
/// sampling one facility at a time while the FOS is partial for t.
///
/// Candidates are facilities not yet in the FOS that can reach at least
/// one user on t, limited to the `candidate_pool` best by τ.
pub fn build_fos<R: Rng>(
    instance: &Instance,
    plain: &ConflModel,
    table: &AttractivenessTable,
    params: &HeuristicParams,
    rng: &mut R,
) -> Result<Fos, HeuristicError> {
    let (fos, stuck) = build_fos_partial(instance, plain, table, params, rng)?;
    match stuck.first() {
        Some(&technology) => Err(HeuristicError::NoCompletableFos { technology }),
        None => Ok(fos),
    }
}

/// Like [`build_fos`], but a technology that runs out of candidates is
/// skipped instead of aborting; the skipped technologies are returned.
pub fn build_fos_partial<R: Rng>(
    instance: &Instance,
    plain: &ConflModel,
    table: &AttractivenessTable,
    params: &HeuristicParams,
    rng: &mut R,
) -> Result<(Fos, Vec<Technology>), HeuristicError> {
    let mut fos = Fos::new();
    let mut stuck = Vec::new();
    for t in Technology::ALL {
        while !is_complete(&fos, instance, t) {
            let mut candidates: Vec<usize> = (0..instance.facilities.len())
                .filter(|&f| fos.technology_of(f).is_none() && instance.potential_weight(f, t) > 0.0)
                .collect();
            if candidates.is_empty() {
                stuck.push(t);
                break;
            }
            // Stable sort keeps facility order among equal τ.
            candidates.sort_by(|&a, &b| table.get(b, t).total_cmp(&table.get(a, t)));
            candidates.truncate(params.candidate_pool);
            let tau: Vec<f64> = candidates.iter().map(|&f| table.get(f, t)).collect();
            let eta = candidates
                .par_iter()
                .map(|&f| posterior_attractiveness(plain, table.root_bound, &fos, (f, t)))
                .collect::<Result<Vec<f64>, _>>()?;
            let probs = fixing_probabilities(&tau, &eta, params.alpha)?;
            let pick = candidates[sample_index(&probs, rng)];
            fos.insert(pick, t)?;
        }
    }
    Ok((fos, stuck))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::*;
    use crate::testutil::single_path;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shared_user() -> Instance {
        let mut inst = single_path();
        inst.users[0].weight = 3.0;
        inst.facilities.push(Facility { id: 1, position: Position::new(0.0, 1.0), open_cost: [1.0; 3] });
        inst.assignment_arcs.fiber.push(AssignmentArc { facility: 1, user: 0, cost: 0.0 });
        inst.coverage_thresholds = [5.0, 5.0, 0.0];
        inst
    }

    #[test]
    fn clash_rejected() {
        let mut f = Fos::new();
        f.insert(2, Technology::Fiber).unwrap();
        f.insert(2, Technology::Fiber).unwrap();
        assert!(matches!(f.insert(2, Technology::Copper), Err(HeuristicError::Clash { .. })));
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn completeness_examples() {
        let mut inst = single_path();
        inst.coverage_thresholds = [0.0; 3];
        assert!(is_complete(&Fos::new(), &inst, Technology::Fiber));

        let inst = shared_user();
        let both: Fos = [(0, Technology::Fiber), (1, Technology::Fiber)].into_iter().collect();
        assert!(is_complete(&both, &inst, Technology::Fiber));
        let one: Fos = [(0, Technology::Fiber)].into_iter().collect();
        assert!(!is_complete(&one, &inst, Technology::Fiber));

        let mut inst = single_path();
        inst.coverage_thresholds[0] = inst.total_weight() + 1.0;
        assert!(!is_complete(&both, &inst, Technology::Fiber));
    }

    #[test]
    fn sampling_follows_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            counts[sample_index(&[0.2, 0.0, 0.8], &mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        assert!((counts[0] as f64 / 30_000.0 - 0.2).abs() < 0.01);
    }

    #[test]
    fn serializes_compactly() {
        let f: Fos = [(3, Technology::Wireless), (1, Technology::Fiber)].into_iter().collect();
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"["f1:t1","f3:t3"]"#);
    }
}
