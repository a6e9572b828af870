//! Budget-limited UCB baseline. Treats the `2M + 1` arms as independent: an
//! observational round updates only the observational arm.

use rand::Rng;

use super::{argmax_canonical, check_gamma, Budget, History};
use crate::env::NoBackdoorEnv;
use crate::{Error, Result};

/// Round robin, then `argmax (mu_hat_a + sqrt(2 ln t / N_a)) / cost_a` over
/// arms the remaining budget can still pay for, with `t` the rounds played.
pub fn run_fkube<R: Rng + ?Sized>(
    env: &NoBackdoorEnv,
    budget: f64,
    gamma: f64,
    rng: &mut R,
) -> Result<History> {
    check_gamma(gamma)?;
    let init = 2.0 * gamma * env.node_count() as f64 + 1.0;
    if budget < init {
        return Err(Error::config(format!(
            "budget {budget} cannot pay for the F-KUBE round robin: need at least 2*gamma*M + 1 = {init}"
        )));
    }
    let arms = env.observe_index() + 1;
    let mut ledger = Budget::new(budget, gamma)?;
    let mut counts = vec![0u64; arms];
    let mut sums = vec![0.0; arms];
    let mut history = History::default();
    let mut values = vec![0; env.node_count()];

    let mut rounds = 0u64;
    loop {
        let arm = if (rounds as usize) < arms {
            rounds as usize
        } else {
            let log_t = (rounds as f64).ln();
            let scores = (0..arms)
                .filter(|&a| ledger.can_afford(a == env.observe_index()))
                .map(|a| {
                    let n = counts[a] as f64;
                    let ucb = sums[a] / n + (2.0 * log_t / n).sqrt();
                    (a, ucb / ledger.cost(a == env.observe_index()))
                });
            match argmax_canonical(scores) {
                Some(a) => a,
                None => break,
            }
        };
        let forced = env.forced_by_index(arm);
        let reward = env.draw(forced, rng, &mut values);
        let cost = ledger.charge(forced.is_none());
        counts[arm] += 1;
        sums[arm] += reward;
        history.push(arm, cost, reward);
        rounds += 1;
    }
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::RewardModel;
    use crate::trial_rng;
    use proptest::prelude::*;

    fn env(m: usize) -> NoBackdoorEnv {
        NoBackdoorEnv::new(vec![0.5; m], RewardModel::Pivot { pivot: 0, mu_hi: 0.9, mu_lo: 0.2 })
            .unwrap()
    }

    #[test]
    fn plays_each_arm_once_then_exploits() {
        let e = env(2);
        let h = run_fkube(&e, 400.0, 1.0, &mut trial_rng(5)).unwrap();
        assert_eq!(h.arm_sequence().take(5).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
        assert_eq!(h.rounds(), 400);
        let counts = h.pull_counts(5);
        let best = (0..5).max_by_key(|&a| counts[a]).unwrap();
        assert_eq!(best, NoBackdoorEnv::arm_index(0, 1));
    }

    #[test]
    fn rejects_unaffordable_round_robin() {
        assert!(run_fkube(&env(3), 12.0, 2.0, &mut trial_rng(0)).is_err());
        assert!(run_fkube(&env(3), 13.0, 2.0, &mut trial_rng(0)).is_ok());
    }

    #[test]
    fn only_affordable_arms_are_scored() {
        // The round robin leaves 2.5 < gamma, so only observations remain.
        let e = env(1);
        let h = run_fkube(&e, 2.0 * 3.0 + 1.0 + 2.5, 3.0, &mut trial_rng(2)).unwrap();
        assert_eq!(h.arm_sequence().collect::<Vec<_>>(), vec![0, 1, 2, 2, 2]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn spend_never_exceeds_budget(
            m in 1usize..8,
            gamma in 1.0f64..10.0,
            extra in 0.0f64..300.0,
            seed in any::<u64>(),
        ) {
            let budget = 2.0 * gamma * m as f64 + 1.0 + extra;
            let h = run_fkube(&env(m), budget, gamma, &mut trial_rng(seed)).unwrap();
            prop_assert!(h.total_cost() <= budget + 1e-9);
            prop_assert!(budget - h.total_cost() < 1.0 + 1e-9);
        }
    }
}
