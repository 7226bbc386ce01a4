use std::time::Duration;

use confl_milp::MipLimits;
use serde::{Deserialize, Serialize};

use crate::error::HeuristicError;

/// Settings of the fixing heuristic.
///
/// With `iterations` set the run is in test mode: the outer loop performs
/// exactly that many iterations and every MIP solve is capped by
/// `node_limit` instead of a wall clock, which makes runs reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicParams {
    /// Weight of the a-priori measure τ against the a-posteriori η.
    pub alpha: f64,
    /// FOS built per outer iteration (Σ).
    pub sigma: usize,
    /// Hamming radius n; `None` means max(2, ⌈0.2·|F|⌉).
    pub vlns_radius: Option<usize>,
    pub global_time_limit: Duration,
    pub outer_loop_limit: Duration,
    pub subproblem_time_limit: Duration,
    pub vlns_time_limit: Duration,
    pub seed: u64,
    /// Candidates kept per sampling step, highest τ first.
    pub candidate_pool: usize,
    pub iterations: Option<usize>,
    pub node_limit: usize,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            alpha: 0.5,
            sigma: 5,
            vlns_radius: None,
            global_time_limit: Duration::from_secs(3600),
            outer_loop_limit: Duration::from_secs(3000),
            subproblem_time_limit: Duration::from_secs(60),
            vlns_time_limit: Duration::from_secs(600),
            seed: 0,
            candidate_pool: 10,
            iterations: None,
            node_limit: 20_000,
        }
    }
}

impl HeuristicParams {
    /// Test-mode parameters: `iterations` outer iterations, node-capped solves.
    pub fn test_mode(iterations: usize, seed: u64) -> Self {
        HeuristicParams {
            iterations: Some(iterations),
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), HeuristicError> {
        let bad = |m: &str| Err(HeuristicError::Params(m.into()));
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        if self.sigma == 0 {
            return bad("sigma must be at least 1");
        }
        if self.candidate_pool == 0 {
            return bad("candidate pool must hold at least one candidate");
        }
        let limits = [
            self.global_time_limit,
            self.outer_loop_limit,
            self.subproblem_time_limit,
            self.vlns_time_limit,
        ];
        if limits.iter().any(|d| d.is_zero()) {
            return bad("time limits must be positive");
        }
        if self.iterations == Some(0) || self.node_limit == 0 {
            return bad("iteration and node caps must be positive");
        }
        Ok(())
    }

    pub fn radius(&self, facilities: usize) -> usize {
        self.vlns_radius
            .unwrap_or_else(|| 2.max((0.2 * facilities as f64).ceil() as usize))
    }

    pub fn is_test_mode(&self) -> bool {
        self.iterations.is_some()
    }

    pub(crate) fn subproblem_limits(&self) -> MipLimits {
        self.limits(self.subproblem_time_limit)
    }

    pub(crate) fn vlns_limits(&self) -> MipLimits {
        self.limits(self.vlns_time_limit)
    }

    fn limits(&self, wall: Duration) -> MipLimits {
        if self.is_test_mode() {
            MipLimits::nodes(self.node_limit)
        } else {
            MipLimits::time(wall)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_radius() {
        let p = HeuristicParams::default();
        assert_eq!((p.alpha, p.sigma), (0.5, 5));
        assert_eq!(p.global_time_limit.as_secs(), 3600);
        assert_eq!(p.outer_loop_limit.as_secs(), 3000);
        assert_eq!(p.vlns_time_limit.as_secs(), 600);
        assert_eq!(p.radius(3), 2);
        assert_eq!(p.radius(30), 6);
        assert_eq!(p.radius(11), 3);
        assert!(p.validate().is_ok());
        let bad = HeuristicParams { sigma: 0, ..p };
        assert!(bad.validate().is_err());
    }
}
