//! Discrete DAG environments with conditional probability tables.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Arm, NodeId, Sample};
use crate::{Error, Result};

/// The exact oracle refuses graphs with more non-reward nodes than this.
pub const MAX_ORACLE_NODES: usize = 20;
/// ... or whose free joint assignment space exceeds this many points.
pub const MAX_ORACLE_ASSIGNMENTS: u128 = 1 << 20;

const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// JSON form of a node. `cpt[r][v]` is `P(node = v | parents = r)`, where rows
/// enumerate parent assignments with the first listed parent most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub name: String,
    #[serde(default = "binary")]
    pub domain: usize,
    #[serde(default)]
    pub parents: Vec<String>,
    pub cpt: Vec<Vec<f64>>,
}

fn binary() -> usize {
    2
}

fn reward_name() -> String {
    "Y".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardNodeSpec {
    #[serde(default = "reward_name")]
    pub name: String,
    pub parents: Vec<String>,
    pub model: RewardKind,
}

/// Conditional law of the reward given its parents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardKind {
    /// `P(Y = 1 | Pa(Y) = y)` for every parent tuple, in tuple order.
    BernoulliTable { probs: Vec<f64> },
    /// `Y = sum_j theta_j * y_j + N(0, sigma^2)`. Not clipped.
    LinearGaussian { theta: Vec<f64>, sigma: f64 },
}

/// An arm in JSON: the string `"observe"` or a map from node name to value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArmSpec {
    Named(String),
    Do(BTreeMap<String, u32>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralSpec {
    pub nodes: Vec<NodeSpec>,
    pub reward: RewardNodeSpec,
    pub arms: Vec<ArmSpec>,
}

/// A validated node with resolved parent ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub name: String,
    pub domain: usize,
    pub parents: Vec<NodeId>,
    pub cpt: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct GeneralCausalEnv {
    nodes: Vec<Node>,
    reward_name: String,
    reward_parents: Vec<NodeId>,
    reward: RewardKind,
    parent_domain: usize,
    arms: Vec<Arm>,
    /// `P(Pa(Y) = y | do(a))` per arm, computed once at construction.
    parent_dists: Vec<Vec<f64>>,
}

impl GeneralCausalEnv {
    pub fn new(
        nodes: Vec<Node>,
        reward_name: String,
        reward_parents: Vec<NodeId>,
        reward: RewardKind,
        arms: Vec<Arm>,
    ) -> Result<Self> {
        validate_nodes(&nodes)?;
        if reward_parents.is_empty() {
            return Err(Error::config("the reward node needs at least one parent"));
        }
        for (j, &p) in reward_parents.iter().enumerate() {
            if p >= nodes.len() {
                return Err(Error::config(format!("reward parent {p} does not exist")));
            }
            if reward_parents[..j].contains(&p) {
                return Err(Error::config(format!(
                    "reward parent {} listed twice",
                    nodes[p].name
                )));
            }
        }
        let parent_domain = nodes[reward_parents[0]].domain;
        if let Some(&odd) = reward_parents.iter().find(|&&p| nodes[p].domain != parent_domain) {
            return Err(Error::config(format!(
                "reward parents must share one domain size; {} has {} values, {} has {}",
                nodes[reward_parents[0]].name, parent_domain, nodes[odd].name, nodes[odd].domain
            )));
        }
        let tuples = checked_pow(parent_domain, reward_parents.len())?;
        match &reward {
            RewardKind::BernoulliTable { probs } => {
                if probs.len() != tuples {
                    return Err(Error::config(format!(
                        "Bernoulli reward table needs {tuples} entries, got {}",
                        probs.len()
                    )));
                }
                if let Some(bad) = probs.iter().find(|q| !(0.0..=1.0).contains(*q)) {
                    return Err(Error::config(format!("reward probability {bad} outside [0, 1]")));
                }
            }
            RewardKind::LinearGaussian { theta, sigma } => {
                if theta.len() != reward_parents.len() {
                    return Err(Error::config(format!(
                        "linear-Gaussian reward needs {} coefficients, got {}",
                        reward_parents.len(),
                        theta.len()
                    )));
                }
                if theta.iter().any(|t| !t.is_finite()) || !(sigma.is_finite() && *sigma >= 0.0) {
                    return Err(Error::config(
                        "linear-Gaussian coefficients must be finite and sigma >= 0",
                    ));
                }
            }
        }
        if arms.is_empty() {
            return Err(Error::config("environment declares no arms"));
        }
        let domains: Vec<usize> = nodes.iter().map(|n| n.domain).collect();
        for (i, arm) in arms.iter().enumerate() {
            arm.validate(&domains)?;
            if arms[..i].contains(arm) {
                return Err(Error::config("arm list contains a duplicate"));
            }
        }

        let mut env = Self {
            nodes,
            reward_name,
            reward_parents,
            reward,
            parent_domain,
            arms,
            parent_dists: Vec::new(),
        };
        let dists = env
            .arms
            .iter()
            .map(|a| env.enumerate_parent_distribution(a))
            .collect::<Result<Vec<_>>>()?;
        check_common_support(&dists)?;
        env.parent_dists = dists;
        Ok(env)
    }

    pub fn from_spec(spec: &GeneralSpec) -> Result<Self> {
        let lookup = |name: &str, upto: usize| -> Result<NodeId> {
            spec.nodes[..upto]
                .iter()
                .position(|n| n.name == name)
                .ok_or_else(|| {
                    if spec.nodes.iter().any(|n| n.name == name) {
                        Error::config(format!(
                            "parent {name} must be declared before its children (nodes are topologically ordered)"
                        ))
                    } else {
                        Error::config(format!("unknown node {name}"))
                    }
                })
        };
        for (i, n) in spec.nodes.iter().enumerate() {
            if spec.nodes[..i].iter().any(|m| m.name == n.name) {
                return Err(Error::config(format!("node name {} used twice", n.name)));
            }
            if n.name == spec.reward.name {
                return Err(Error::config(format!(
                    "node {} clashes with the reward node name",
                    n.name
                )));
            }
        }
        let nodes = spec
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                Ok(Node {
                    name: n.name.clone(),
                    domain: n.domain,
                    parents: n
                        .parents
                        .iter()
                        .map(|p| lookup(p, i))
                        .collect::<Result<_>>()?,
                    cpt: n.cpt.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let reward_parents = spec
            .reward
            .parents
            .iter()
            .map(|p| lookup(p, nodes.len()))
            .collect::<Result<Vec<_>>>()?;
        let arms = spec
            .arms
            .iter()
            .map(|a| match a {
                ArmSpec::Named(s) if s == "observe" => Ok(Arm::Observe),
                ArmSpec::Named(s) => Err(Error::config(format!(
                    "unknown arm {s:?}; use \"observe\" or a map of node values"
                ))),
                ArmSpec::Do(map) => Arm::intervene(
                    map.iter()
                        .map(|(k, &v)| Ok((lookup(k, nodes.len())?, v)))
                        .collect::<Result<Vec<_>>>()?,
                ),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(nodes, spec.reward.name.clone(), reward_parents, spec.reward.model.clone(), arms)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn reward_name(&self) -> &str {
        &self.reward_name
    }

    /// `Pa(Y)` in declared order.
    pub fn reward_parents(&self) -> &[NodeId] {
        &self.reward_parents
    }

    pub fn reward_kind(&self) -> &RewardKind {
        &self.reward
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    /// Shared domain size `k` of the reward parents.
    pub fn parent_domain(&self) -> usize {
        self.parent_domain
    }

    /// Number of parent tuples, `k^n`.
    pub fn parent_tuple_count(&self) -> usize {
        self.parent_domain.pow(self.reward_parents.len() as u32)
    }

    /// Index of a parent tuple, first parent most significant.
    pub fn tuple_index(&self, values: &[u32]) -> usize {
        self.reward_parents
            .iter()
            .fold(0, |acc, &p| acc * self.parent_domain + values[p] as usize)
    }

    /// Decodes a tuple index back into parent values.
    pub fn tuple_values(&self, mut index: usize) -> Vec<u32> {
        let n = self.reward_parents.len();
        let mut out = vec![0; n];
        for slot in out.iter_mut().rev() {
            *slot = (index % self.parent_domain) as u32;
            index /= self.parent_domain;
        }
        out
    }

    /// `E[Y | Pa(Y) = y]` for tuple index `y`.
    pub fn tuple_mean(&self, tuple: usize) -> f64 {
        match &self.reward {
            RewardKind::BernoulliTable { probs } => probs[tuple],
            RewardKind::LinearGaussian { theta, .. } => self
                .tuple_values(tuple)
                .iter()
                .zip(theta)
                .map(|(&y, t)| t * f64::from(y))
                .sum(),
        }
    }

    fn tuple_second_moment(&self, tuple: usize) -> f64 {
        match &self.reward {
            RewardKind::BernoulliTable { probs } => probs[tuple],
            RewardKind::LinearGaussian { sigma, .. } => {
                let m = self.tuple_mean(tuple);
                m * m + sigma * sigma
            }
        }
    }

    /// Precomputed `P(Pa(Y) = y | do(arms[i]))`, one vector per arm.
    pub fn parent_distributions(&self) -> &[Vec<f64>] {
        &self.parent_dists
    }

    /// Exact `P(Pa(Y) = y | do(arm))` by enumerating the post-surgery joint.
    pub fn interventional_parent_distribution(&self, arm: &Arm) -> Result<Vec<f64>> {
        if let Some(i) = self.arms.iter().position(|a| a == arm) {
            return Ok(self.parent_dists[i].clone());
        }
        arm.validate(&self.nodes.iter().map(|n| n.domain).collect::<Vec<_>>())?;
        self.enumerate_parent_distribution(arm)
    }

    fn enumerate_parent_distribution(&self, arm: &Arm) -> Result<Vec<f64>> {
        self.check_oracle_size(arm)?;
        let mut dist = vec![0.0; self.parent_tuple_count()];
        let mut values = vec![0u32; self.nodes.len()];
        self.enumerate(arm, 0, 1.0, &mut values, &mut |vals, p| {
            dist[self.tuple_index(vals)] += p;
        });
        Ok(dist)
    }

    fn check_oracle_size(&self, arm: &Arm) -> Result<()> {
        let assignments: u128 = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| arm.forced(*i).is_none())
            .map(|(_, n)| n.domain as u128)
            .try_fold(1u128, |acc, k| acc.checked_mul(k))
            .unwrap_or(u128::MAX);
        if self.nodes.len() > MAX_ORACLE_NODES || assignments > MAX_ORACLE_ASSIGNMENTS {
            return Err(Error::TooLarge {
                nodes: self.nodes.len(),
                assignments,
                max_nodes: MAX_ORACLE_NODES,
                max_assignments: MAX_ORACLE_ASSIGNMENTS,
            });
        }
        Ok(())
    }

    /// Depth-first walk over node assignments in topological order, calling
    /// `visit` with every complete assignment of positive probability.
    fn enumerate(
        &self,
        arm: &Arm,
        depth: usize,
        prob: f64,
        values: &mut [u32],
        visit: &mut dyn FnMut(&[u32], f64),
    ) {
        if depth == self.nodes.len() {
            visit(values, prob);
            return;
        }
        if let Some(v) = arm.forced(depth) {
            values[depth] = v;
            self.enumerate(arm, depth + 1, prob, values, visit);
            return;
        }
        let row = &self.nodes[depth].cpt[self.cpt_row(depth, values)];
        for (v, &q) in row.iter().enumerate() {
            if q > 0.0 {
                values[depth] = v as u32;
                self.enumerate(arm, depth + 1, prob * q, values, visit);
            }
        }
    }

    fn cpt_row(&self, node: NodeId, values: &[u32]) -> usize {
        self.nodes[node]
            .parents
            .iter()
            .fold(0, |acc, &p| acc * self.nodes[p].domain + values[p] as usize)
    }

    /// Exact expected reward under `arm`.
    pub fn true_mean(&self, arm: &Arm) -> Result<f64> {
        let dist = self.interventional_parent_distribution(arm)?;
        Ok(dist.iter().enumerate().map(|(y, p)| p * self.tuple_mean(y)).sum())
    }

    /// Exact reward variance under `arm`, including observation noise.
    pub fn reward_variance(&self, arm: &Arm) -> Result<f64> {
        let dist = self.interventional_parent_distribution(arm)?;
        let mean: f64 = dist.iter().enumerate().map(|(y, p)| p * self.tuple_mean(y)).sum();
        let second: f64 = dist
            .iter()
            .enumerate()
            .map(|(y, p)| p * self.tuple_second_moment(y))
            .sum();
        Ok((second - mean * mean).max(0.0))
    }

    /// Samples into `values` and returns the reward.
    pub fn draw<R: Rng + ?Sized>(&self, arm: &Arm, rng: &mut R, values: &mut [u32]) -> f64 {
        for i in 0..self.nodes.len() {
            let u: f64 = rng.random();
            values[i] = match arm.forced(i) {
                Some(v) => v,
                None => {
                    let row = &self.nodes[i].cpt[self.cpt_row(i, values)];
                    let mut acc = 0.0;
                    let mut pick = row.len() - 1;
                    for (v, &q) in row.iter().enumerate() {
                        acc += q;
                        if u < acc {
                            pick = v;
                            break;
                        }
                    }
                    pick as u32
                }
            };
        }
        let tuple = self.tuple_index(values);
        match &self.reward {
            RewardKind::BernoulliTable { probs } => {
                let u: f64 = rng.random();
                if u < probs[tuple] {
                    1.0
                } else {
                    0.0
                }
            }
            RewardKind::LinearGaussian { sigma, .. } => {
                let z: f64 = rng.sample(StandardNormal);
                self.tuple_mean(tuple) + sigma * z
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, arm: &Arm, rng: &mut R) -> Result<Sample> {
        arm.validate(&self.nodes.iter().map(|n| n.domain).collect::<Vec<_>>())?;
        let mut values = vec![0; self.nodes.len()];
        let reward = self.draw(arm, rng, &mut values);
        Ok(Sample { arm: arm.clone(), values, reward })
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    base.checked_pow(exp as u32)
        .filter(|&n| n as u128 <= MAX_ORACLE_ASSIGNMENTS)
        .ok_or_else(|| Error::config("too many reward-parent tuples"))
}

fn validate_nodes(nodes: &[Node]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::config("environment has no nodes"));
    }
    for (i, node) in nodes.iter().enumerate() {
        if node.domain == 0 {
            return Err(Error::config(format!("node {} has an empty domain", node.name)));
        }
        let mut rows = 1usize;
        for (j, &p) in node.parents.iter().enumerate() {
            // parents must precede their children, which rules out cycles
            if p >= i {
                return Err(Error::config(format!(
                    "node {} has parent #{p} that does not precede it; the graph must be acyclic and topologically ordered",
                    node.name
                )));
            }
            if node.parents[..j].contains(&p) {
                return Err(Error::config(format!("node {} lists a parent twice", node.name)));
            }
            rows = rows
                .checked_mul(nodes[p].domain)
                .ok_or_else(|| Error::config(format!("CPT of {} is too large", node.name)))?;
        }
        if node.cpt.len() != rows {
            return Err(Error::config(format!(
                "CPT of {} needs {rows} rows, got {}",
                node.name,
                node.cpt.len()
            )));
        }
        for (r, row) in node.cpt.iter().enumerate() {
            if row.len() != node.domain {
                return Err(Error::config(format!(
                    "CPT row {r} of {} has {} entries, expected {}",
                    node.name,
                    row.len(),
                    node.domain
                )));
            }
            if let Some(bad) = row.iter().find(|q| !(0.0..=1.0).contains(*q)) {
                return Err(Error::config(format!(
                    "CPT row {r} of {} has probability {bad} outside [0, 1]",
                    node.name
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::config(format!(
                    "CPT row {r} of {} sums to {sum}, not 1",
                    node.name
                )));
            }
        }
    }
    Ok(())
}

fn check_common_support(dists: &[Vec<f64>]) -> Result<()> {
    let support = |d: &Vec<f64>| d.iter().map(|&p| p > 0.0).collect::<Vec<_>>();
    let first = support(&dists[0]);
    for (i, d) in dists.iter().enumerate().skip(1) {
        if support(d) != first {
            return Err(Error::config(format!(
                "arm {i} induces a parent distribution whose support differs from arm 0"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trial_rng;

    fn node(name: &str, parents: &[usize], cpt: Vec<Vec<f64>>) -> Node {
        Node { name: name.into(), domain: 2, parents: parents.to_vec(), cpt }
    }

    /// X1 -> X2, X1 -> W1, X2 -> W2, (W1, W2) -> Y with a linear reward.
    fn exp4() -> GeneralCausalEnv {
        let nodes = vec![
            node("X1", &[], vec![vec![0.45, 0.55]]),
            node("X2", &[0], vec![vec![0.55, 0.45], vec![0.45, 0.55]]),
            node("W1", &[0], vec![vec![0.46, 0.54], vec![0.54, 0.46]]),
            node("W2", &[1], vec![vec![0.52, 0.48], vec![0.48, 0.52]]),
        ];
        let arms = vec![Arm::single(0, 0), Arm::single(0, 1), Arm::single(1, 0), Arm::single(1, 1)];
        GeneralCausalEnv::new(
            nodes,
            "Y".into(),
            vec![2, 3],
            RewardKind::LinearGaussian { theta: vec![0.25, 0.25], sigma: 0.01 },
            arms,
        )
        .unwrap()
    }

    #[test]
    fn table_two_means() {
        let env = exp4();
        let want = [0.2595, 0.2405, 0.244, 0.254];
        for (a, w) in env.arms().iter().zip(want) {
            assert!((env.true_mean(a).unwrap() - w).abs() < 1e-9);
        }
    }

    #[test]
    fn parent_marginals_under_do_x1_0() {
        let env = exp4();
        let d = env.interventional_parent_distribution(&Arm::single(0, 0)).unwrap();
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // tuples ordered (W1, W2): 00, 01, 10, 11
        let w1 = d[2] + d[3];
        let w2 = d[1] + d[3];
        assert!((w1 - 0.54).abs() < 1e-12);
        assert!((w2 - (0.55 * 0.48 + 0.45 * 0.52)).abs() < 1e-12);
        assert!((w2 - 0.498).abs() < 1e-12);
    }

    #[test]
    fn deterministic_tables_sample_one_assignment() {
        let nodes = vec![
            node("A", &[], vec![vec![0.0, 1.0]]),
            node("B", &[0], vec![vec![1.0, 0.0], vec![1.0, 0.0]]),
        ];
        let env = GeneralCausalEnv::new(
            nodes,
            "Y".into(),
            vec![0, 1],
            RewardKind::BernoulliTable { probs: vec![0.0, 0.0, 1.0, 0.0] },
            vec![Arm::Observe],
        )
        .unwrap();
        let mut rng = trial_rng(5);
        for _ in 0..100 {
            let s = env.sample(&Arm::Observe, &mut rng).unwrap();
            assert_eq!(s.values, vec![1, 0]);
            assert_eq!(s.reward, 1.0);
        }
    }

    #[test]
    fn rejects_bad_rows() {
        let mut nodes = vec![node("A", &[], vec![vec![0.3, 0.7 + 1e-9]])];
        let reward = RewardKind::BernoulliTable { probs: vec![0.2, 0.8] };
        let err = GeneralCausalEnv::new(nodes.clone(), "Y".into(), vec![0], reward.clone(), vec![Arm::Observe]);
        assert!(err.is_err());
        // within tolerance is accepted
        nodes[0].cpt = vec![vec![0.3, 0.7 + 1e-14]];
        assert!(GeneralCausalEnv::new(nodes, "Y".into(), vec![0], reward, vec![Arm::Observe]).is_ok());
    }

    #[test]
    fn rejects_cycles_and_mismatched_domains() {
        let nodes = vec![
            node("A", &[1], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
            node("B", &[], vec![vec![0.5, 0.5]]),
        ];
        let reward = RewardKind::BernoulliTable { probs: vec![0.2, 0.8] };
        assert!(GeneralCausalEnv::new(nodes, "Y".into(), vec![0], reward, vec![Arm::Observe]).is_err());

        let nodes = vec![
            node("A", &[], vec![vec![0.5, 0.5]]),
            Node { name: "B".into(), domain: 3, parents: vec![], cpt: vec![vec![0.2, 0.3, 0.5]] },
        ];
        let reward = RewardKind::BernoulliTable { probs: vec![0.5; 6] };
        assert!(GeneralCausalEnv::new(nodes, "Y".into(), vec![0, 1], reward, vec![Arm::Observe]).is_err());
    }

    #[test]
    fn rejects_mismatched_support() {
        // do(A=1) makes B=1 impossible, do(A=0) does not.
        let nodes = vec![
            node("A", &[], vec![vec![0.5, 0.5]]),
            node("B", &[0], vec![vec![0.5, 0.5], vec![1.0, 0.0]]),
        ];
        let reward = RewardKind::BernoulliTable { probs: vec![0.1, 0.9] };
        let err = GeneralCausalEnv::new(
            nodes,
            "Y".into(),
            vec![1],
            reward,
            vec![Arm::single(0, 0), Arm::single(0, 1)],
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn oracle_size_cap() {
        let nodes: Vec<Node> = (0..21).map(|i| node(&format!("N{i}"), &[], vec![vec![0.5, 0.5]])).collect();
        let reward = RewardKind::BernoulliTable { probs: vec![0.2, 0.8] };
        let err = GeneralCausalEnv::new(nodes, "Y".into(), vec![0], reward, vec![Arm::Observe]);
        assert!(matches!(err, Err(Error::TooLarge { .. })));
    }

    #[test]
    fn tuple_index_round_trips() {
        let env = exp4();
        for t in 0..env.parent_tuple_count() {
            let vals = env.tuple_values(t);
            let mut full = vec![0; 4];
            full[2] = vals[0];
            full[3] = vals[1];
            assert_eq!(env.tuple_index(&full), t);
        }
    }

    #[test]
    fn spec_resolves_names() {
        let json = r#"{
            "nodes": [
                {"name": "X", "cpt": [[0.3, 0.7]]},
                {"name": "Z", "parents": ["X"], "cpt": [[0.9, 0.1], [0.2, 0.8]]}
            ],
            "reward": {"parents": ["Z"], "model": {"kind": "bernoulli_table", "probs": [0.1, 0.6]}},
            "arms": ["observe", {"X": 1}]
        }"#;
        let spec: GeneralSpec = serde_json::from_str(json).unwrap();
        let env = GeneralCausalEnv::from_spec(&spec).unwrap();
        assert_eq!(env.arms(), &[Arm::Observe, Arm::single(0, 1)]);
        let mu = env.true_mean(&Arm::single(0, 1)).unwrap();
        assert!((mu - (0.2 * 0.1 + 0.8 * 0.6)).abs() < 1e-12);

        let bad = json.replace(r#""parents": ["X"]"#, r#""parents": ["Q"]"#);
        let spec: GeneralSpec = serde_json::from_str(&bad).unwrap();
        assert!(GeneralCausalEnv::from_spec(&spec).is_err());
    }
}
