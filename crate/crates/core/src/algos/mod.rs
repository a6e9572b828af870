//! Bandit policies.
//!
//! Budgeted policies for no-backdoor environments use the canonical arm
//! layout of [`NoBackdoorEnv`](crate::env::NoBackdoorEnv): `do(X_i = x)` at
//! index `2i + x`, the observational arm last. Observations cost 1 and
//! interventions cost `gamma`. Horizon policies for general environments use
//! the environment's own arm order and unit cost.
//!
//! Every argmax breaks ties towards the lowest canonical arm index.

mod best_arm;
mod crm;
mod estimates;
mod fkube;
mod parent_ucb;

pub use best_arm::{
    gamma_nb_branch, run_gamma_nb_alg, run_obs_alg, run_pb_alg_budgeted, BestArmRun, Branch,
};
pub use crm::{crm_beta_update, run_crm_nb_alg, CrmNbAlg, NbState};
pub use estimates::{estimate_from_observations, ObservationTally, ObservationalEstimates};
pub use fkube::run_fkube;
pub use parent_ucb::{
    cucb2_radius, cucb2_zeta, run_cucb2, run_cucb_baseline, Cucb2State, ParentModel, ParentUcb,
    ParentUcbKind,
};

use crate::{Error, Result};

/// One round: which arm was pulled, what it cost, the realized reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pull {
    pub arm: usize,
    pub cost: f64,
    pub reward: f64,
}

/// The pull sequence of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pulls: Vec<Pull>,
}

impl History {
    pub fn push(&mut self, arm: usize, cost: f64, reward: f64) {
        self.pulls.push(Pull { arm, cost, reward });
    }

    pub fn pulls(&self) -> &[Pull] {
        &self.pulls
    }

    pub fn rounds(&self) -> usize {
        self.pulls.len()
    }

    pub fn total_cost(&self) -> f64 {
        self.pulls.iter().map(|p| p.cost).sum()
    }

    pub fn total_reward(&self) -> f64 {
        self.pulls.iter().map(|p| p.reward).sum()
    }

    pub fn arm_sequence(&self) -> impl Iterator<Item = usize> + '_ {
        self.pulls.iter().map(|p| p.arm)
    }

    pub fn pull_counts(&self, arms: usize) -> Vec<u64> {
        let mut counts = vec![0; arms];
        for p in &self.pulls {
            counts[p.arm] += 1;
        }
        counts
    }

    /// First `rounds` pulls.
    pub fn prefix(&self, rounds: usize) -> &[Pull] {
        &self.pulls[..rounds.min(self.pulls.len())]
    }
}

/// Budget ledger for the unit-cost observation / `gamma`-cost intervention
/// model. Spend is recomputed from pull counts so repeated fractional charges
/// never drift past the total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    total: f64,
    gamma: f64,
    observations: u64,
    interventions: u64,
}

impl Budget {
    pub fn new(total: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(total.is_finite() && total >= 0.0) {
            return Err(Error::config(format!("budget {total} must be finite and non-negative")));
        }
        Ok(Self { total, gamma, observations: 0, interventions: 0 })
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cost(&self, observe: bool) -> f64 {
        if observe {
            1.0
        } else {
            self.gamma
        }
    }

    pub fn spent(&self) -> f64 {
        self.observations as f64 + self.gamma * self.interventions as f64
    }

    pub fn remaining(&self) -> f64 {
        self.total - self.spent()
    }

    pub fn can_afford(&self, observe: bool) -> bool {
        self.spent() + self.cost(observe) <= self.total
    }

    /// Records one pull and returns its cost.
    pub fn charge(&mut self, observe: bool) -> f64 {
        debug_assert!(self.can_afford(observe), "pull exceeds budget");
        if observe {
            self.observations += 1;
        } else {
            self.interventions += 1;
        }
        self.cost(observe)
    }

    pub fn observations(&self) -> u64 {
        self.observations
    }

    pub fn interventions(&self) -> u64 {
        self.interventions
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!("intervention cost gamma = {gamma} must be >= 1")))
    }
}

/// Index of the largest score; ties go to the lowest index, NaN never wins.
/// The result does not depend on the order in which pairs are supplied.
pub fn argmax_canonical(scores: impl IntoIterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores {
        if s.is_nan() {
            continue;
        }
        best = match best {
            Some((bi, bs)) if bs > s || (bs == s && bi < i) => Some((bi, bs)),
            _ => Some((i, s)),
        };
    }
    best.map(|(i, _)| i)
}

/// [`argmax_canonical`] over a dense score vector.
pub fn argmax(scores: &[f64]) -> usize {
    argmax_canonical(scores.iter().copied().enumerate()).unwrap_or(0)
}

/// `m(p)` for a possibly single-node estimate vector. With one node the
/// defining set is trivially satisfied at `tau = 1`.
pub(crate) fn hardness(p_hat: &[f64]) -> usize {
    if p_hat.len() < 2 {
        return 1;
    }
    crate::env::m_index(p_hat).expect("estimates are frequencies in [0, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        assert_eq!(argmax(&[0.1, 0.5, 0.5, 0.2]), 1);
        assert_eq!(argmax(&[0.3, 0.3, 0.3]), 0);
        assert_eq!(argmax(&[f64::NAN, 0.3, 0.3]), 1);
        assert_eq!(argmax_canonical([(4, 1.0), (2, 1.0), (3, 0.5)]), Some(2));
    }

    #[test]
    fn budget_tracks_mixed_costs() {
        let mut b = Budget::new(10.0, 1.5).unwrap();
        for _ in 0..6 {
            assert!(b.can_afford(false));
            b.charge(false);
        }
        assert_eq!(b.spent(), 9.0);
        assert!(!b.can_afford(false));
        assert!(b.can_afford(true));
        b.charge(true);
        assert!(!b.can_afford(true));
        assert_eq!(b.remaining(), 0.0);

        let mut b = Budget::new(10.0, 1.1).unwrap();
        while b.can_afford(false) {
            b.charge(false);
        }
        assert_eq!(b.interventions(), 9);
        assert!(b.spent() <= 10.0);
        assert!(Budget::new(10.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn argmax_is_permutation_invariant(
            scores in prop::collection::vec(prop::sample::select(vec![0.0, 0.25, 0.5, 1.0]), 1..20),
            seed in any::<u64>(),
        ) {
            let mut pairs: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
            let expected = argmax_canonical(pairs.clone());
            // Fisher-Yates driven by a tiny LCG so the permutation depends on `seed`.
            let mut state = seed;
            for i in (1..pairs.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                pairs.swap(i, j);
            }
            prop_assert_eq!(argmax_canonical(pairs), expected);
        }
    }
}
