use std::fmt::Write;

use crate::algos::ParentModel;
use crate::env::{m_index, Environment};
use crate::Result;

/// Plain-text summary of an environment: exact arm means and gaps, the
/// backdoor classification of each node, and the hardness index (no-backdoor
/// graphs) or parent distributions with `zeta_a` (general graphs).
pub fn inspect_env(env: &Environment) -> Result<String> {
    let means = env.true_means()?;
    let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let names = env.node_names();
    let mut out = String::new();

    let kind = match env {
        Environment::NoBackdoor(_) => "no_backdoor",
        Environment::General(_) => "general",
    };
    writeln!(out, "environment: {kind}, {} nodes, {} arms", env.node_count(), means.len()).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "{:<5} {:<24} {:>12} {:>12}", "arm", "label", "mean", "gap").unwrap();
    for (i, m) in means.iter().enumerate() {
        writeln!(out, "{:<5} {:<24} {:>12.6} {:>12.6}", i, env.arm_label(i), m, best - m).unwrap();
    }

    writeln!(out).unwrap();
    writeln!(out, "no-backdoor nodes:").unwrap();
    for (name, free) in names.iter().zip(env.classify_no_backdoor()) {
        writeln!(out, "  {name}: {}", if free { "yes" } else { "no (open backdoor path)" }).unwrap();
    }

    match env {
        Environment::NoBackdoor(nb) => {
            if nb.node_count() >= 2 {
                writeln!(out).unwrap();
                writeln!(out, "m(p) = {}", m_index(nb.probs())?).unwrap();
            }
            writeln!(out, "min probability = {}", nb.min_prob()).unwrap();
        }
        Environment::General(g) => {
            let model = ParentModel::from_env(g)?;
            let parents: Vec<&str> = g.reward_parents().iter().map(|&p| names[p].as_str()).collect();
            writeln!(out).unwrap();
            writeln!(out, "P(({}) = y | do(a)), tuples in mixed-radix order:", parents.join(", ")).unwrap();
            let header: Vec<String> =
                (0..g.parent_tuple_count()).map(|y| format!("{:?}", g.tuple_values(y))).collect();
            writeln!(out, "{:<24} {}  zeta", "arm", header.iter().map(|h| format!("{h:>10}")).collect::<String>())
                .unwrap();
            for (a, (dist, zeta)) in model.dists().iter().zip(model.zeta()).enumerate() {
                let cells: String = dist.iter().map(|p| format!("{p:>10.6}")).collect();
                writeln!(out, "{:<24} {cells}  {zeta:.6}", env.arm_label(a)).unwrap();
            }
            writeln!(out, "delta = {:.6}", model.delta()).unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{backdoor_env, parallel_env};

    #[test]
    fn backdoor_report_lists_means_and_classification() {
        let text = inspect_env(&backdoor_env().build().unwrap()).unwrap();
        assert!(text.contains("0.259500"), "{text}");
        assert!(text.contains("0.240500"));
        assert!(text.contains("X2: no"));
        assert!(text.contains("X1: yes"));
        assert!(text.contains("zeta"));
    }

    #[test]
    fn parallel_report_has_hardness() {
        let text = inspect_env(&parallel_env(0.02, 0.3).build().unwrap()).unwrap();
        assert!(text.contains("m(p) = 2"));
        assert!(!text.contains("open backdoor path"));
    }
}
