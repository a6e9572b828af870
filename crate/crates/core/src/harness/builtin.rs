//! The five canned experiments.

use std::collections::BTreeMap;

use super::config::{ExperimentConfig, Metric, PolicyKind, PolicySpec, Sweep, SweepVariable};
use crate::env::{ArmSpec, EnvSpec, GeneralSpec, NoBackdoorSpec, NodeSpec, RewardKind, RewardModel, RewardNodeSpec};
use crate::{Error, Result};

pub const BUILTIN_NAMES: [&str; 5] = ["exp1", "exp2a", "exp2b", "exp3", "exp4"];

/// `M = 50` parallel graph with `p_1 = p_2 = p`, other nodes fair coins, and
/// the reward `0.5 + epsilon` when `X_1 = 1`, balanced so `mu_0 = 0.5`.
pub fn parallel_env(p: f64, epsilon: f64) -> EnvSpec {
    let mut probs = vec![0.5; 50];
    probs[0] = p;
    probs[1] = p;
    EnvSpec::NoBackdoor(NoBackdoorSpec {
        probs,
        reward: RewardModel::BalancedPivot { pivot: 0, base: 0.5, epsilon },
    })
}

/// `X1 -> X2`, `X1 -> W1`, `X2 -> W2`, `Y = 0.25 W1 + 0.25 W2 + N(0, 0.01^2)`;
/// the arms are the four single-node interventions on `X1` and `X2`.
pub fn backdoor_env() -> EnvSpec {
    let node = |name: &str, parents: &[&str], cpt: Vec<Vec<f64>>| NodeSpec {
        name: name.into(),
        domain: 2,
        parents: parents.iter().map(|p| p.to_string()).collect(),
        cpt,
    };
    let arm = |name: &str, v: u32| ArmSpec::Do(BTreeMap::from([(name.to_string(), v)]));
    EnvSpec::General(GeneralSpec {
        nodes: vec![
            node("X1", &[], vec![vec![0.45, 0.55]]),
            node("X2", &["X1"], vec![vec![0.55, 0.45], vec![0.45, 0.55]]),
            node("W1", &["X1"], vec![vec![0.46, 0.54], vec![0.54, 0.46]]),
            node("W2", &["X2"], vec![vec![0.52, 0.48], vec![0.48, 0.52]]),
        ],
        reward: RewardNodeSpec {
            name: "Y".into(),
            parents: vec!["W1".into(), "W2".into()],
            model: RewardKind::LinearGaussian { theta: vec![0.25, 0.25], sigma: 0.01 },
        },
        arms: vec![arm("X1", 0), arm("X1", 1), arm("X2", 0), arm("X2", 1)],
    })
}

fn grid(start: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + step * i as f64).collect()
}

pub fn builtin_experiment(name: &str) -> Result<ExperimentConfig> {
    let base = |name: &str, env, policies, sweep, metric| ExperimentConfig {
        name: name.into(),
        env,
        policies,
        sweep,
        metric,
        budget: None,
        horizon: None,
        trials: 300,
        base_seed: 0,
        full_scale_trials: Some(1000),
    };
    let sweep = |variable, values| Sweep { variable, values, targets: Vec::new() };
    let gamma_nb_vs_pb = |gamma| {
        vec![PolicySpec::new(PolicyKind::GammaNbAlg, gamma), PolicySpec::new(PolicyKind::PbAlg, gamma)]
    };
    Ok(match name {
        "exp1" => ExperimentConfig {
            budget: Some(100.0),
            ..base(
                name,
                parallel_env(0.02, 0.3),
                vec![PolicySpec::new(PolicyKind::ObsAlg, 1.0), PolicySpec::new(PolicyKind::PbAlg, 1.0)],
                Sweep {
                    variable: SweepVariable::MinProb,
                    values: vec![0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
                    targets: vec![0, 1],
                },
                Metric::SimpleRegret,
            )
        },
        "exp2a" => base(
            name,
            parallel_env(0.02, 0.3),
            gamma_nb_vs_pb(60.0),
            sweep(SweepVariable::Budget, grid(500.0, 500.0, 6)),
            Metric::SimpleRegret,
        ),
        "exp2b" => ExperimentConfig {
            budget: Some(3000.0),
            ..base(
                name,
                parallel_env(0.02, 0.3),
                gamma_nb_vs_pb(1.0),
                sweep(SweepVariable::Gamma, vec![1.0, 15.0, 30.0, 45.0, 60.0, 75.0]),
                Metric::SimpleRegret,
            )
        },
        "exp3" => {
            let mut policies = Vec::new();
            for kind in [PolicyKind::CrmNbAlg, PolicyKind::FKube] {
                for gamma in [1.0, 1.1, 1.5] {
                    policies.push(
                        PolicySpec::new(kind, gamma).labeled(format!("{}(gamma={gamma})", kind.default_label())),
                    );
                }
            }
            ExperimentConfig {
                trials: 50,
                full_scale_trials: Some(50),
                ..base(
                    name,
                    parallel_env(0.02, 0.5),
                    policies,
                    sweep(SweepVariable::Budget, grid(1000.0, 1000.0, 10)),
                    Metric::CumulativeRegretBudgeted,
                )
            }
        }
        "exp4" => ExperimentConfig {
            trials: 500,
            full_scale_trials: Some(500),
            ..base(
                name,
                backdoor_env(),
                vec![PolicySpec::new(PolicyKind::CUcb2, 1.0), PolicySpec::new(PolicyKind::CUcb, 1.0)],
                sweep(SweepVariable::Horizon, grid(5.0, 5.0, 20)),
                Metric::CumulativeRegretHorizon,
            )
        },
        other => {
            return Err(Error::Config(format!(
                "unknown built-in experiment {other:?}; expected one of {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    })
}
