//! Cumulative-regret policy for no-backdoor environments with costly
//! interventions. Observational rounds double as samples of every `do(X_i = x)`
//! through the effective pull count `E^{i,x}`.

use rand::Rng;

use super::{argmax, check_gamma, Budget, History};
use crate::env::NoBackdoorEnv;
use crate::{Error, Result};

/// Counts and sums shared by the cumulative-regret policies.
#[derive(Debug, Clone, PartialEq)]
pub struct NbState {
    /// `N^{i,x}`: direct pulls of `do(X_i = x)`.
    pub pulls: Vec<[u64; 2]>,
    /// `E^{i,x}`: direct pulls plus observational rounds with `X_i = x`.
    pub effective: Vec<[u64; 2]>,
    direct_sums: Vec<[f64; 2]>,
    observed_sums: Vec<[f64; 2]>,
    /// `N^0`.
    pub observe_pulls: u64,
    observe_sum: f64,
    pub rounds: u64,
    pub beta: f64,
    pub budget: Budget,
}

impl NbState {
    pub fn new(nodes: usize, budget: Budget) -> Self {
        Self {
            pulls: vec![[0; 2]; nodes],
            effective: vec![[0; 2]; nodes],
            direct_sums: vec![[0.0; 2]; nodes],
            observed_sums: vec![[0.0; 2]; nodes],
            observe_pulls: 0,
            observe_sum: 0.0,
            rounds: 0,
            beta: 1.0,
            budget,
        }
    }

    pub fn node_count(&self) -> usize {
        self.pulls.len()
    }

    pub fn observe_index(&self) -> usize {
        2 * self.node_count()
    }

    /// Folds one round into the counts. `values` are the realized node values.
    pub fn update_estimates(&mut self, arm: usize, values: &[u32], reward: f64) {
        self.rounds += 1;
        if arm == self.observe_index() {
            self.observe_pulls += 1;
            self.observe_sum += reward;
            for (i, &x) in values.iter().enumerate() {
                self.effective[i][x as usize] += 1;
                self.observed_sums[i][x as usize] += reward;
            }
        } else {
            let (i, x) = (arm / 2, arm % 2);
            self.pulls[i][x] += 1;
            self.effective[i][x] += 1;
            self.direct_sums[i][x] += reward;
        }
    }

    /// `mu_hat_{i,x}` pooled over direct and observational rounds; 0 if unseen.
    pub fn mean(&self, node: usize, value: usize) -> f64 {
        let e = self.effective[node][value];
        if e == 0 {
            0.0
        } else {
            (self.direct_sums[node][value] + self.observed_sums[node][value]) / e as f64
        }
    }

    pub fn observe_mean(&self) -> f64 {
        if self.observe_pulls == 0 {
            0.0
        } else {
            self.observe_sum / self.observe_pulls as f64
        }
    }

    /// `max_{i,x} mu_hat_{i,x}`.
    pub fn best_interventional_mean(&self) -> f64 {
        (0..self.node_count())
            .flat_map(|i| [self.mean(i, 0), self.mean(i, 1)])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cost-weighted upper confidence bounds in canonical order.
    ///
    /// # Panics
    /// If any count is zero; the initial round robin rules that out.
    pub fn weighted_ucb(&self, t: u64) -> Vec<f64> {
        let gamma = self.budget.gamma();
        let log_t = (t as f64).ln();
        let mut out = Vec::with_capacity(self.observe_index() + 1);
        for i in 0..self.node_count() {
            for x in 0..2 {
                let e = self.effective[i][x];
                assert!(e > 0, "weighted UCB needs every E^{{i,x}} >= 1");
                out.push((self.mean(i, x) + (8.0 * log_t / e as f64).sqrt()) / gamma);
            }
        }
        assert!(self.observe_pulls > 0, "weighted UCB needs N^0 >= 1");
        out.push(self.observe_mean() + (8.0 * log_t / self.observe_pulls as f64).sqrt());
        out
    }

    /// `E >= N` everywhere and `sum_x (E^{i,x} - N^{i,x}) = N^0` for every node.
    pub fn ledger_consistent(&self) -> bool {
        self.effective.iter().zip(&self.pulls).all(|(e, n)| {
            e[0] >= n[0] && e[1] >= n[1] && (e[0] - n[0]) + (e[1] - n[1]) == self.observe_pulls
        })
    }
}

/// Returns the new `beta`: tightened when the observational arm looks worse
/// than the best cost-adjusted intervention, otherwise `beta_prev`.
pub fn crm_beta_update(mu_star: f64, mu_observe: f64, gamma: f64, t: u64, beta_prev: f64) -> f64 {
    let gap = mu_star / gamma - mu_observe;
    if gap > 0.0 {
        (2.0 * 2f64.sqrt() / gap).min((t as f64).ln().sqrt())
    } else {
        beta_prev
    }
}

/// Step-wise driver, exposed so callers can inspect the state between rounds.
#[derive(Debug, Clone)]
pub struct CrmNbAlg<'e> {
    env: &'e NoBackdoorEnv,
    state: NbState,
    history: History,
    values: Vec<u32>,
}

impl<'e> CrmNbAlg<'e> {
    pub fn new(env: &'e NoBackdoorEnv, budget: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let init = 2.0 * gamma * env.node_count() as f64 + 1.0;
        if budget <= init {
            return Err(Error::config(format!(
                "budget {budget} cannot pay for the initial round robin: need more than 2*gamma*M + 1 = {init}"
            )));
        }
        Ok(Self {
            env,
            state: NbState::new(env.node_count(), Budget::new(budget, gamma)?),
            history: History::default(),
            values: vec![0; env.node_count()],
        })
    }

    pub fn state(&self) -> &NbState {
        &self.state
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn into_history(self) -> History {
        self.history
    }

    fn in_round_robin(&self) -> bool {
        self.state.rounds <= self.state.observe_index() as u64
    }

    /// Arm the policy would pull next, `None` once the budget is exhausted.
    pub fn next_arm(&self) -> Option<usize> {
        let s = &self.state;
        if self.in_round_robin() {
            return Some(s.rounds as usize);
        }
        let remaining = s.budget.remaining();
        if remaining < 1.0 {
            return None;
        }
        let t = s.rounds + 1;
        let starved = (s.observe_pulls as f64) < s.beta * s.beta * (t as f64).ln();
        if starved || remaining < s.budget.gamma() {
            Some(s.observe_index())
        } else {
            Some(argmax(&s.weighted_ucb(s.rounds)))
        }
    }

    /// Plays one round; returns the arm pulled.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        let arm = self.next_arm()?;
        let past_init = !self.in_round_robin();
        let forced = self.env.forced_by_index(arm);
        let reward = self.env.draw(forced, rng, &mut self.values);
        let cost = self.state.budget.charge(forced.is_none());
        self.state.update_estimates(arm, &self.values, reward);
        self.history.push(arm, cost, reward);
        if past_init {
            let s = &mut self.state;
            s.beta = crm_beta_update(
                s.best_interventional_mean(),
                s.observe_mean(),
                s.budget.gamma(),
                s.rounds,
                s.beta,
            );
        }
        Some(arm)
    }
}

pub fn run_crm_nb_alg<R: Rng + ?Sized>(
    env: &NoBackdoorEnv,
    budget: f64,
    gamma: f64,
    rng: &mut R,
) -> Result<History> {
    let mut alg = CrmNbAlg::new(env, budget, gamma)?;
    while alg.step(rng).is_some() {}
    Ok(alg.into_history())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::RewardModel;
    use crate::trial_rng;
    use proptest::prelude::*;

    fn env(m: usize, eps: f64) -> NoBackdoorEnv {
        NoBackdoorEnv::new(
            vec![0.5; m],
            RewardModel::Pivot { pivot: 0, mu_hi: 0.5 + eps, mu_lo: 0.5 },
        )
        .unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-5
    }

    #[test]
    fn observation_feeds_every_node() {
        let mut s = NbState::new(2, Budget::new(100.0, 1.0).unwrap());
        s.update_estimates(4, &[1, 0], 1.0);
        assert_eq!(s.effective, vec![[0, 1], [1, 0]]);
        assert_eq!(s.pulls, vec![[0, 0], [0, 0]]);
        s.update_estimates(1, &[1, 1], 0.0);
        assert_eq!(s.pulls[0][1], 1);
        assert_eq!(s.effective[0][1], 2);
        assert_eq!(s.mean(0, 1), 0.5);
        assert!(s.ledger_consistent());
    }

    #[test]
    fn weighted_ucb_examples() {
        let mut s = NbState::new(1, Budget::new(1000.0, 1.5).unwrap());
        s.effective[0] = [50, 50];
        s.direct_sums[0] = [40.0, 40.0];
        s.observe_pulls = 50;
        s.observe_sum = 25.0;
        let u = s.weighted_ucb(100);
        assert!(close(u[0], 1.10559), "{}", u[0]);
        assert!(close(u[2], 1.35839), "{}", u[2]);

        s.effective[0] = [u64::MAX / 2, 1];
        s.direct_sums[0][0] = 0.8 * (u64::MAX / 2) as f64;
        assert!(close(s.weighted_ucb(100)[0], 0.8 / 1.5));
    }

    #[test]
    #[should_panic(expected = "E^{i,x}")]
    fn weighted_ucb_rejects_zero_counts() {
        NbState::new(1, Budget::new(10.0, 1.0).unwrap()).weighted_ucb(10);
    }

    #[test]
    fn beta_update_examples() {
        assert!(close(crm_beta_update(1.0, 0.5, 1.0, 100, 1.0), 2.14597));
        assert!(close(crm_beta_update(1.0, 1.0 - 1e-9, 1.0, 10, 1.0), 1.51743));
        assert_eq!(crm_beta_update(1.0, 0.7, 1.5, 100, 3.0), 3.0);
        assert_eq!(crm_beta_update(0.6, 0.4, 1.5, 100, 1.25), 1.25);
    }

    #[test]
    fn unaffordable_round_robin_is_rejected() {
        let e = env(2, 0.3);
        let err = CrmNbAlg::new(&e, 9.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("round robin"));
        assert!(CrmNbAlg::new(&e, 9.5, 2.0).is_ok());
    }

    #[test]
    fn observes_when_an_intervention_is_unaffordable() {
        // Round robin costs 2 * 2 + 1 = 5 and leaves 1.5 = gamma - 0.5.
        let e = env(1, 0.3);
        let mut alg = CrmNbAlg::new(&e, 6.5, 2.0).unwrap();
        let mut rng = trial_rng(4);
        for expected in 0..3 {
            assert_eq!(alg.step(&mut rng), Some(expected));
        }
        assert!((alg.state().budget.remaining() - 1.5).abs() < 1e-12);
        assert_eq!(alg.next_arm(), Some(2));
        alg.step(&mut rng);
        assert_eq!(alg.next_arm(), None);
    }

    #[test]
    fn round_robin_then_adaptive() {
        let e = env(3, 0.3);
        let h = run_crm_nb_alg(&e, 500.0, 1.5, &mut trial_rng(11)).unwrap();
        let first: Vec<usize> = h.arm_sequence().take(7).collect();
        assert_eq!(first, (0..7).collect::<Vec<_>>());
        assert_eq!(h, run_crm_nb_alg(&e, 500.0, 1.5, &mut trial_rng(11)).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn ledger_and_budget_hold_every_round(
            m in 1usize..6,
            gamma in 1.0f64..5.0,
            extra in 0.5f64..200.0,
            seed in any::<u64>(),
        ) {
            let e = env(m, 0.3);
            let budget = 2.0 * gamma * m as f64 + 1.0 + extra;
            let mut alg = CrmNbAlg::new(&e, budget, gamma).unwrap();
            let mut rng = trial_rng(seed);
            while alg.step(&mut rng).is_some() {
                prop_assert!(alg.state().ledger_consistent());
                prop_assert!(alg.state().budget.spent() <= budget);
                prop_assert!(alg.state().beta > 0.0);
            }
            prop_assert!(alg.state().budget.remaining() < 1.0);
        }
    }
}
