//! Discrete causal environments.
//!
//! Two families are supported. [`NoBackdoorEnv`] models `M` independent
//! Bernoulli causes of a Bernoulli reward (the parallel graph and any graph
//! without backdoor paths into the reward). [`GeneralCausalEnv`] is an arbitrary
//! DAG over finite-domain nodes with conditional probability tables, a
//! designated reward node and an explicit arm list.
//!
//! Environments are immutable once built. Sampling takes a caller-owned
//! generator and draws one uniform per node in node order, plus the reward
//! draw, regardless of which nodes are forced. Exact quantities (arm means,
//! parent distributions, reward variances) come from enumeration, never from
//! sampling.

mod general;
mod graph;
mod hardness;
mod no_backdoor;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use general::{
    ArmSpec, GeneralCausalEnv, GeneralSpec, Node, NodeSpec, RewardKind, RewardNodeSpec,
    MAX_ORACLE_ASSIGNMENTS, MAX_ORACLE_NODES,
};
pub use graph::backdoor_free_nodes;
pub use hardness::m_index;
pub use no_backdoor::{balanced_offset, NoBackdoorEnv, NoBackdoorSpec, RewardModel};

use crate::{Error, Result};

/// Index of a non-reward node in declared (topological) order.
pub type NodeId = usize;

/// One allowed intervention. `Observe` is the empty intervention `do()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    Observe,
    /// Forced `(node, value)` pairs, sorted by node id.
    Intervene(Vec<(NodeId, u32)>),
}

impl Arm {
    /// `do(node = value)`.
    pub fn single(node: NodeId, value: u32) -> Self {
        Arm::Intervene(vec![(node, value)])
    }

    /// Builds an intervention, sorting assignments into canonical node order.
    pub fn intervene(mut assignments: Vec<(NodeId, u32)>) -> Result<Self> {
        if assignments.is_empty() {
            return Err(Error::config("an intervention needs at least one assignment"));
        }
        assignments.sort_unstable();
        if assignments.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::config("an intervention assigns the same node twice"));
        }
        Ok(Arm::Intervene(assignments))
    }

    pub fn is_observe(&self) -> bool {
        matches!(self, Arm::Observe)
    }

    pub fn assignments(&self) -> &[(NodeId, u32)] {
        match self {
            Arm::Observe => &[],
            Arm::Intervene(a) => a,
        }
    }

    /// The value this arm forces on `node`, if any.
    pub fn forced(&self, node: NodeId) -> Option<u32> {
        self.assignments()
            .iter()
            .find(|(n, _)| *n == node)
            .map(|&(_, v)| v)
    }

    /// Checks node ids and values against the given per-node domain sizes.
    pub fn validate(&self, domains: &[usize]) -> Result<()> {
        if let Arm::Intervene(a) = self {
            if a.is_empty() {
                return Err(Error::config("an intervention needs at least one assignment"));
            }
            for (i, &(node, value)) in a.iter().enumerate() {
                let Some(&k) = domains.get(node) else {
                    return Err(Error::config(format!("arm refers to unknown node {node}")));
                };
                if value as usize >= k {
                    return Err(Error::config(format!(
                        "arm sets node {node} to {value}, outside its domain of size {k}"
                    )));
                }
                if a[..i].iter().any(|(n, _)| *n == node) {
                    return Err(Error::config(format!("arm assigns node {node} twice")));
                }
            }
        }
        Ok(())
    }

    /// Human-readable label such as `do(X1=0)` or `do()`.
    pub fn label(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .assignments()
            .iter()
            .map(|&(n, v)| {
                let name = names.get(n).cloned().unwrap_or_else(|| format!("#{n}"));
                format!("{name}={v}")
            })
            .collect();
        format!("do({})", parts.join(","))
    }
}

/// One round of interaction with an environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub arm: Arm,
    /// Realized value of every non-reward node, in node order.
    pub values: Vec<u32>,
    pub reward: f64,
}

/// JSON description of an environment, tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnvSpec {
    NoBackdoor(NoBackdoorSpec),
    General(GeneralSpec),
}

impl EnvSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<Environment> {
        Ok(match self {
            EnvSpec::NoBackdoor(s) => Environment::NoBackdoor(NoBackdoorEnv::from_spec(s)?),
            EnvSpec::General(s) => Environment::General(GeneralCausalEnv::from_spec(s)?),
        })
    }
}

/// A built, validated environment.
#[derive(Debug, Clone)]
pub enum Environment {
    NoBackdoor(NoBackdoorEnv),
    General(GeneralCausalEnv),
}

impl Environment {
    /// Arms in canonical order. For no-backdoor environments this is
    /// `do(X1=0), do(X1=1), ..., do(XM=1), do()`.
    pub fn arms(&self) -> &[Arm] {
        match self {
            Environment::NoBackdoor(e) => e.arms(),
            Environment::General(e) => e.arms(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Environment::NoBackdoor(e) => e.node_count(),
            Environment::General(e) => e.node_count(),
        }
    }

    pub fn node_names(&self) -> Vec<String> {
        match self {
            Environment::NoBackdoor(e) => (1..=e.node_count()).map(|i| format!("X{i}")).collect(),
            Environment::General(e) => e.nodes().iter().map(|n| n.name.clone()).collect(),
        }
    }

    pub fn arm_label(&self, arm: usize) -> String {
        self.arms()[arm].label(&self.node_names())
    }

    pub fn arm_index(&self, arm: &Arm) -> Option<usize> {
        match self {
            Environment::NoBackdoor(e) => e.index_of(arm),
            Environment::General(e) => e.arms().iter().position(|a| a == arm),
        }
    }

    /// Samples one round under `arm`.
    pub fn sample<R: Rng + ?Sized>(&self, arm: &Arm, rng: &mut R) -> Result<Sample> {
        match self {
            Environment::NoBackdoor(e) => e.sample(arm, rng),
            Environment::General(e) => e.sample(arm, rng),
        }
    }

    /// Exact expected reward of `arm` by enumeration.
    pub fn true_mean(&self, arm: &Arm) -> Result<f64> {
        match self {
            Environment::NoBackdoor(e) => e.true_mean(arm),
            Environment::General(e) => e.true_mean(arm),
        }
    }

    /// Exact means of every arm, in canonical order.
    pub fn true_means(&self) -> Result<Vec<f64>> {
        self.arms().iter().map(|a| self.true_mean(a)).collect()
    }

    /// Exact reward variance of `arm` by enumeration.
    pub fn reward_variance(&self, arm: &Arm) -> Result<f64> {
        match self {
            Environment::NoBackdoor(e) => e.reward_variance(arm),
            Environment::General(e) => e.reward_variance(arm),
        }
    }

    /// Per non-reward node: `true` when it has no open backdoor path to the
    /// reward node.
    pub fn classify_no_backdoor(&self) -> Vec<bool> {
        match self {
            // Independent roots: nothing points into any X_i.
            Environment::NoBackdoor(e) => vec![true; e.node_count()],
            Environment::General(e) => backdoor_free_nodes(e),
        }
    }

    pub fn as_no_backdoor(&self) -> Option<&NoBackdoorEnv> {
        match self {
            Environment::NoBackdoor(e) => Some(e),
            Environment::General(_) => None,
        }
    }

    pub fn as_general(&self) -> Option<&GeneralCausalEnv> {
        match self {
            Environment::General(e) => Some(e),
            Environment::NoBackdoor(_) => None,
        }
    }
}
