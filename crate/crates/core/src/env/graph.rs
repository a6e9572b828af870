//! Backdoor-path check on a causal DAG.

use super::GeneralCausalEnv;

/// Adjacency of the full graph, with the reward node appended as the last id.
struct Dag {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    fn of(env: &GeneralCausalEnv) -> Self {
        let n = env.node_count();
        let mut parents: Vec<Vec<usize>> = env.nodes().iter().map(|x| x.parents.clone()).collect();
        parents.push(env.reward_parents().to_vec());
        let mut children = vec![Vec::new(); n + 1];
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        Self { parents, children }
    }

    /// Is there a collider-free simple path from `start` to `target` whose
    /// first edge points into `start`?
    fn has_open_backdoor(&self, start: usize, target: usize) -> bool {
        let mut on_path = vec![false; self.parents.len()];
        on_path[start] = true;
        self.parents[start]
            .iter()
            .any(|&p| self.walk(p, false, target, &mut on_path))
    }

    /// `downstream` is true when `node` was reached along an edge pointing
    /// into it. Leaving such a node towards one of its parents would make it a
    /// collider, so only children are explored from there.
    fn walk(&self, node: usize, downstream: bool, target: usize, on_path: &mut [bool]) -> bool {
        if node == target {
            return true;
        }
        if on_path[node] {
            return false;
        }
        on_path[node] = true;
        let found = (!downstream
            && self.parents[node]
                .iter()
                .any(|&p| self.walk(p, false, target, on_path)))
            || self.children[node]
                .iter()
                .any(|&c| self.walk(c, true, target, on_path));
        on_path[node] = false;
        found
    }
}

/// For every non-reward node, `true` when no open backdoor path connects it to
/// the reward node (no conditioning set, so colliders block).
pub fn backdoor_free_nodes(env: &GeneralCausalEnv) -> Vec<bool> {
    let dag = Dag::of(env);
    let reward = env.node_count();
    (0..env.node_count())
        .map(|x| !dag.has_open_backdoor(x, reward))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Arm, Node, RewardKind};

    fn env(edges: &[&[usize]], reward_parents: &[usize]) -> GeneralCausalEnv {
        let nodes = edges
            .iter()
            .enumerate()
            .map(|(i, ps)| Node {
                name: format!("N{i}"),
                domain: 2,
                parents: ps.to_vec(),
                cpt: vec![vec![0.5, 0.5]; 1 << ps.len()],
            })
            .collect();
        let probs = vec![0.5; 1 << reward_parents.len()];
        GeneralCausalEnv::new(
            nodes,
            "Y".into(),
            reward_parents.to_vec(),
            RewardKind::BernoulliTable { probs },
            vec![Arm::Observe],
        )
        .unwrap()
    }

    /// Exhaustive simple-path enumeration over the skeleton, checking the
    /// backdoor and collider conditions on each completed path.
    fn brute(e: &GeneralCausalEnv) -> Vec<bool> {
        let dag = Dag::of(e);
        let y = e.node_count();
        let n = y + 1;
        let adjacent = |a: usize, b: usize| dag.parents[a].contains(&b) || dag.parents[b].contains(&a);
        fn paths(cur: &mut Vec<usize>, y: usize, n: usize, adj: &dyn Fn(usize, usize) -> bool, out: &mut Vec<Vec<usize>>) {
            let last = *cur.last().unwrap();
            if last == y {
                out.push(cur.clone());
                return;
            }
            for v in 0..n {
                if !cur.contains(&v) && adj(last, v) {
                    cur.push(v);
                    paths(cur, y, n, adj, out);
                    cur.pop();
                }
            }
        }
        (0..y)
            .map(|x| {
                let mut all = Vec::new();
                paths(&mut vec![x], y, n, &adjacent, &mut all);
                !all.iter().any(|p| {
                    let into_x = dag.parents[x].contains(&p[1]);
                    let collider = p.windows(3).any(|w| {
                        dag.parents[w[1]].contains(&w[0]) && dag.parents[w[1]].contains(&w[2])
                    });
                    into_x && !collider
                })
            })
            .collect()
    }

    #[test]
    fn parallel_graph_is_backdoor_free() {
        let e = env(&[&[], &[], &[]], &[0, 1, 2]);
        assert_eq!(backdoor_free_nodes(&e), vec![true; 3]);
    }

    #[test]
    fn experiment_four_graph() {
        // X1, X2 <- X1, W1 <- X1, W2 <- X2, Y <- (W1, W2)
        let e = env(&[&[], &[0], &[0], &[1]], &[2, 3]);
        let got = backdoor_free_nodes(&e);
        assert_eq!(got, brute(&e));
        assert!(got[0]);
        assert!(!got[1]);
    }

    #[test]
    fn chain_has_no_backdoor() {
        let e = env(&[&[], &[0]], &[1]);
        assert_eq!(backdoor_free_nodes(&e), vec![true, true]);
        assert_eq!(brute(&e), vec![true, true]);
    }

    #[test]
    fn collider_blocks() {
        // A -> C <- B, B -> Y, C -> Y. Path C <- A has no way to Y except
        // through C itself; C <- B -> Y is open.
        let e = env(&[&[], &[], &[0, 1]], &[1, 2]);
        let got = backdoor_free_nodes(&e);
        assert_eq!(got, brute(&e));
        assert_eq!(got, vec![true, true, false]);
        // Only C -> Y: every backdoor walk out of C dead-ends at a root.
        let e = env(&[&[], &[], &[0, 1]], &[2]);
        assert_eq!(backdoor_free_nodes(&e), brute(&e));
        assert_eq!(backdoor_free_nodes(&e), vec![true; 3]);
    }

    #[test]
    fn matches_exhaustive_search_on_small_dags() {
        // every DAG on 4 ordered nodes where Y has parents {2, 3}
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for mask in 0u32..(1 << pairs.len()) {
            let mut edges: Vec<Vec<usize>> = vec![Vec::new(); 4];
            for (b, &(p, c)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    edges[c].push(p);
                }
            }
            let refs: Vec<&[usize]> = edges.iter().map(|v| v.as_slice()).collect();
            let e = env(&refs, &[2, 3]);
            assert_eq!(backdoor_free_nodes(&e), brute(&e), "mask {mask:b}");
        }
    }
}
