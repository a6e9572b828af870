//! `M` independent Bernoulli causes of a Bernoulli reward.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Arm, NodeId, Sample};
use crate::{Error, Result};

/// Largest reward-table key set accepted by [`RewardModel::Table`]; also the
/// cap on the number of nodes the exact oracle enumerates.
const MAX_TABLE_NODES: usize = 20;

/// How the reward mean depends on the node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardModel {
    /// Mean `mu_hi` when the pivot node is 1, `mu_lo` otherwise.
    Pivot { pivot: NodeId, mu_hi: f64, mu_lo: f64 },
    /// `mu_hi = base + epsilon`, with `mu_lo` lowered so that the
    /// observational mean stays at `base`. Resolved into a [`RewardModel::Pivot`]
    /// when the environment is built.
    BalancedPivot { pivot: NodeId, base: f64, epsilon: f64 },
    /// Full lookup on a subset of nodes. Entry `j` of `means` is the mean when
    /// `nodes[b]` equals bit `b` of `j` (first listed node is the lowest bit).
    Table { nodes: Vec<NodeId>, means: Vec<f64> },
}

/// `p * epsilon / (1 - p)`: the downward offset that keeps the observational
/// mean of a balanced pivot model at its base value.
pub fn balanced_offset(p: f64, epsilon: f64) -> f64 {
    p * epsilon / (1.0 - p)
}

/// JSON form of a no-backdoor environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoBackdoorSpec {
    /// `P(X_i = 1)` for each intervenable node.
    pub probs: Vec<f64>,
    pub reward: RewardModel,
}

#[derive(Debug, Clone)]
pub struct NoBackdoorEnv {
    probs: Vec<f64>,
    reward: RewardModel,
    arms: Vec<Arm>,
}

impl NoBackdoorEnv {
    pub fn new(probs: Vec<f64>, reward: RewardModel) -> Result<Self> {
        let m = probs.len();
        if m == 0 {
            return Err(Error::config("no-backdoor environment needs at least one node"));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::config(format!(
                    "P(X{} = 1) = {p} must lie strictly between 0 and 1",
                    i + 1
                )));
            }
        }
        let check_node = |n: NodeId| {
            if n >= m {
                Err(Error::config(format!("reward model refers to node {n}, but M = {m}")))
            } else {
                Ok(())
            }
        };
        let check_mean = |mu: f64| {
            if (0.0..=1.0).contains(&mu) {
                Ok(())
            } else {
                Err(Error::config(format!("reward mean {mu} outside [0, 1]")))
            }
        };
        let reward = match reward {
            RewardModel::Pivot { pivot, mu_hi, mu_lo } => {
                check_node(pivot)?;
                check_mean(mu_hi)?;
                check_mean(mu_lo)?;
                RewardModel::Pivot { pivot, mu_hi, mu_lo }
            }
            RewardModel::BalancedPivot { pivot, base, epsilon } => {
                check_node(pivot)?;
                let mu_hi = base + epsilon;
                let mu_lo = base - balanced_offset(probs[pivot], epsilon);
                check_mean(mu_hi)?;
                check_mean(mu_lo)?;
                RewardModel::Pivot { pivot, mu_hi, mu_lo }
            }
            RewardModel::Table { nodes, means } => {
                if nodes.len() > MAX_TABLE_NODES {
                    return Err(Error::config(format!(
                        "reward table keyed on {} nodes; at most {MAX_TABLE_NODES} supported",
                        nodes.len()
                    )));
                }
                for (j, &n) in nodes.iter().enumerate() {
                    check_node(n)?;
                    if nodes[..j].contains(&n) {
                        return Err(Error::config(format!("reward table lists node {n} twice")));
                    }
                }
                if means.len() != 1 << nodes.len() {
                    return Err(Error::config(format!(
                        "reward table over {} nodes needs {} entries, got {}",
                        nodes.len(),
                        1usize << nodes.len(),
                        means.len()
                    )));
                }
                for &mu in &means {
                    check_mean(mu)?;
                }
                RewardModel::Table { nodes, means }
            }
        };
        let mut arms = Vec::with_capacity(2 * m + 1);
        for i in 0..m {
            arms.push(Arm::single(i, 0));
            arms.push(Arm::single(i, 1));
        }
        arms.push(Arm::Observe);
        Ok(Self { probs, reward, arms })
    }

    pub fn from_spec(spec: &NoBackdoorSpec) -> Result<Self> {
        Self::new(spec.probs.clone(), spec.reward.clone())
    }

    /// Number of intervenable nodes `M`.
    pub fn node_count(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `P(X_i = x)`.
    pub fn prob(&self, node: NodeId, value: u32) -> f64 {
        if value == 1 {
            self.probs[node]
        } else {
            1.0 - self.probs[node]
        }
    }

    /// `min_{i,x} P(X_i = x)`.
    pub fn min_prob(&self) -> f64 {
        self.probs
            .iter()
            .map(|&p| p.min(1.0 - p))
            .fold(f64::INFINITY, f64::min)
    }

    /// The resolved reward model (balanced pivots are already resolved).
    pub fn reward_model(&self) -> &RewardModel {
        &self.reward
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    /// Canonical index of `do(X_node = value)`.
    pub fn arm_index(node: NodeId, value: u32) -> usize {
        2 * node + value as usize
    }

    /// Canonical index of the observational arm; always last.
    pub fn observe_index(&self) -> usize {
        2 * self.probs.len()
    }

    pub fn index_of(&self, arm: &Arm) -> Option<usize> {
        match arm.assignments() {
            [] => Some(self.observe_index()),
            &[(node, value)] if node < self.node_count() && value <= 1 => {
                Some(Self::arm_index(node, value))
            }
            _ => None,
        }
    }

    /// Inverse of [`Self::arm_index`]; `None` for the observational arm.
    pub fn forced_by_index(&self, arm: usize) -> Option<(NodeId, u32)> {
        (arm < self.observe_index()).then(|| (arm / 2, (arm % 2) as u32))
    }

    fn mean_for(&self, value_of: impl Fn(NodeId) -> u32) -> f64 {
        match &self.reward {
            RewardModel::Pivot { pivot, mu_hi, mu_lo } => {
                if value_of(*pivot) == 1 {
                    *mu_hi
                } else {
                    *mu_lo
                }
            }
            RewardModel::Table { nodes, means } => {
                let key = nodes
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (b, &n)| acc | ((value_of(n) as usize & 1) << b));
                means[key]
            }
            RewardModel::BalancedPivot { .. } => unreachable!("resolved at construction"),
        }
    }

    /// Reward mean given a full node assignment.
    pub fn mean_given(&self, values: &[u32]) -> f64 {
        self.mean_for(|n| values[n])
    }

    /// Samples into `values` (length `M`) and returns the reward. `forced` is the
    /// single assignment of an interventional arm.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        forced: Option<(NodeId, u32)>,
        rng: &mut R,
        values: &mut [u32],
    ) -> f64 {
        for (i, (&p, slot)) in self.probs.iter().zip(values.iter_mut()).enumerate() {
            let u: f64 = rng.random();
            *slot = match forced {
                Some((n, v)) if n == i => v,
                _ => u32::from(u < p),
            };
        }
        let mu = self.mean_given(values);
        let u: f64 = rng.random();
        if u < mu {
            1.0
        } else {
            0.0
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, arm: &Arm, rng: &mut R) -> Result<Sample> {
        let forced = self.forced_of(arm)?;
        let mut values = vec![0; self.node_count()];
        let reward = self.draw(forced, rng, &mut values);
        Ok(Sample { arm: arm.clone(), values, reward })
    }

    fn forced_of(&self, arm: &Arm) -> Result<Option<(NodeId, u32)>> {
        match arm.assignments() {
            [] => Ok(None),
            &[(node, value)] => {
                arm.validate(&vec![2; self.node_count()])?;
                Ok(Some((node, value)))
            }
            _ => Err(Error::config(
                "no-backdoor arms intervene on exactly one node",
            )),
        }
    }

    fn relevant_nodes(&self) -> Vec<NodeId> {
        match &self.reward {
            RewardModel::Pivot { pivot, .. } | RewardModel::BalancedPivot { pivot, .. } => {
                vec![*pivot]
            }
            RewardModel::Table { nodes, .. } => nodes.clone(),
        }
    }

    /// Enumerates joint assignments of the nodes the reward depends on. The
    /// remaining nodes are independent of the reward and marginalize out.
    fn expectation(&self, arm: &Arm) -> Result<f64> {
        let forced = self.forced_of(arm)?;
        let nodes = self.relevant_nodes();
        debug_assert!(nodes.len() <= MAX_TABLE_NODES);
        let mut total = 0.0;
        let mut values = vec![0u32; self.node_count()];
        for mask in 0u64..(1u64 << nodes.len()) {
            let mut prob = 1.0;
            for (b, &n) in nodes.iter().enumerate() {
                let x = ((mask >> b) & 1) as u32;
                values[n] = x;
                prob *= match forced {
                    Some((fn_, fv)) if fn_ == n => f64::from(u8::from(fv == x)),
                    _ => self.prob(n, x),
                };
            }
            if prob > 0.0 {
                total += prob * self.mean_given(&values);
            }
        }
        Ok(total)
    }

    /// Exact `E[Y | do(arm)]`.
    pub fn true_mean(&self, arm: &Arm) -> Result<f64> {
        self.expectation(arm)
    }

    /// Exact reward variance under `arm`. A mixture of Bernoullis is
    /// Bernoulli, so this is `mu * (1 - mu)`.
    pub fn reward_variance(&self, arm: &Arm) -> Result<f64> {
        let mu = self.true_mean(arm)?;
        Ok(mu * (1.0 - mu))
    }
}

impl From<&NoBackdoorEnv> for NoBackdoorSpec {
    fn from(env: &NoBackdoorEnv) -> Self {
        NoBackdoorSpec { probs: env.probs.clone(), reward: env.reward.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trial_rng;

    fn pivot_env(probs: Vec<f64>, eps: f64) -> NoBackdoorEnv {
        NoBackdoorEnv::new(probs, RewardModel::BalancedPivot { pivot: 0, base: 0.5, epsilon: eps })
            .unwrap()
    }

    #[test]
    fn arm_layout_is_canonical() {
        let env = pivot_env(vec![0.3, 0.5, 0.6], 0.2);
        assert_eq!(env.arms().len(), 7);
        assert_eq!(env.arms()[0], Arm::single(0, 0));
        assert_eq!(env.arms()[5], Arm::single(2, 1));
        assert_eq!(env.arms()[6], Arm::Observe);
        for (i, a) in env.arms().iter().enumerate() {
            assert_eq!(env.index_of(a), Some(i));
        }
        assert_eq!(env.forced_by_index(3), Some((1, 1)));
        assert_eq!(env.forced_by_index(6), None);
    }

    #[test]
    fn rejects_degenerate_probabilities() {
        let reward = RewardModel::Pivot { pivot: 0, mu_hi: 0.5, mu_lo: 0.5 };
        assert!(NoBackdoorEnv::new(vec![0.0, 0.5], reward.clone()).is_err());
        assert!(NoBackdoorEnv::new(vec![0.5, 1.0], reward.clone()).is_err());
        assert!(NoBackdoorEnv::new(vec![f64::NAN], reward).is_err());
    }

    #[test]
    fn rejects_out_of_range_means() {
        let r = RewardModel::Pivot { pivot: 0, mu_hi: 1.2, mu_lo: 0.1 };
        assert!(NoBackdoorEnv::new(vec![0.5], r).is_err());
        // epsilon' would push mu_lo below zero
        let r = RewardModel::BalancedPivot { pivot: 0, base: 0.1, epsilon: 0.5 };
        assert!(NoBackdoorEnv::new(vec![0.5], r).is_err());
        let r = RewardModel::Table { nodes: vec![0, 1], means: vec![0.1, 0.2, 0.3] };
        assert!(NoBackdoorEnv::new(vec![0.5, 0.5], r).is_err());
        let r = RewardModel::Pivot { pivot: 3, mu_hi: 0.5, mu_lo: 0.5 };
        assert!(NoBackdoorEnv::new(vec![0.5, 0.5], r).is_err());
    }

    #[test]
    fn balanced_pivot_keeps_observational_mean() {
        let env = pivot_env(vec![0.02, 0.02, 0.5, 0.5], 0.3);
        assert!((env.true_mean(&Arm::Observe).unwrap() - 0.5).abs() < 1e-12);
        assert!((env.true_mean(&Arm::single(0, 1)).unwrap() - 0.8).abs() < 1e-12);
        assert!((env.true_mean(&Arm::single(1, 1)).unwrap() - 0.5).abs() < 1e-12);
        let lo = 0.5 - 0.02 * 0.3 / 0.98;
        assert!((env.true_mean(&Arm::single(0, 0)).unwrap() - lo).abs() < 1e-12);
    }

    #[test]
    fn table_reward_enumerates_joint() {
        // Y mean = 0.9 if X1 = X2 = 1, 0.1 otherwise; p1 = 0.3, p2 = 0.6.
        let r = RewardModel::Table { nodes: vec![0, 1], means: vec![0.1, 0.1, 0.1, 0.9] };
        let env = NoBackdoorEnv::new(vec![0.3, 0.6, 0.5], r).unwrap();
        let obs = env.true_mean(&Arm::Observe).unwrap();
        assert!((obs - (0.1 + 0.8 * 0.18)).abs() < 1e-12);
        let do11 = env.true_mean(&Arm::single(0, 1)).unwrap();
        assert!((do11 - (0.1 + 0.8 * 0.6)).abs() < 1e-12);
        let v = env.reward_variance(&Arm::single(0, 1)).unwrap();
        assert!((v - do11 * (1.0 - do11)).abs() < 1e-12);
    }

    #[test]
    fn intervention_forces_value() {
        let env = pivot_env(vec![0.3, 0.5, 0.02], 0.2);
        let mut rng = trial_rng(11);
        for _ in 0..2000 {
            let s = env.sample(&Arm::single(2, 1), &mut rng).unwrap();
            assert_eq!(s.values[2], 1);
            let s = env.sample(&Arm::single(0, 0), &mut rng).unwrap();
            assert_eq!(s.values[0], 0);
        }
    }

    #[test]
    fn rejects_foreign_arms() {
        let env = pivot_env(vec![0.3, 0.5], 0.2);
        let mut rng = trial_rng(0);
        assert!(env.sample(&Arm::single(2, 1), &mut rng).is_err());
        assert!(env.sample(&Arm::single(0, 2), &mut rng).is_err());
        let pair = Arm::intervene(vec![(0, 1), (1, 1)]).unwrap();
        assert!(env.sample(&pair, &mut rng).is_err());
        assert!(env.true_mean(&pair).is_err());
    }
}
