use causal_bandits::algos::{run_gamma_nb_alg, run_pb_alg_budgeted};
use causal_bandits::harness::{builtin_experiment, parallel_env, run_experiment, ExperimentConfig, RunOptions};
use causal_bandits::trial_rng;

fn small(name: &str, trials: usize) -> ExperimentConfig {
    let mut cfg = builtin_experiment(name).unwrap();
    cfg.trials = trials;
    cfg
}

#[test]
fn csv_is_identical_across_worker_counts() {
    let cfg = small("exp2b", 8);
    let run = |jobs| run_experiment(&cfg, &RunOptions { jobs: Some(jobs), progress: None }).unwrap();
    let one = run(1);
    let four = run(4);
    assert_eq!(one.csv_string().unwrap(), four.csv_string().unwrap());
    assert_eq!(one.trials_json(), four.trials_json());
}

#[test]
fn trials_use_consecutive_seeds_shared_by_policies() {
    let mut cfg = small("exp4", 3);
    cfg.base_seed = 17;
    let out = run_experiment(&cfg, &RunOptions::default()).unwrap();
    for t in &out.trials {
        assert_eq!(t.seed, 17 + t.trial as u64);
    }
}

#[test]
fn adding_trials_keeps_earlier_trials() {
    let few = run_experiment(&small("exp1", 3), &RunOptions::default()).unwrap();
    let more = run_experiment(&small("exp1", 6), &RunOptions::default()).unwrap();
    for t in &few.trials {
        let same = more
            .trials
            .iter()
            .find(|u| u.policy == t.policy && u.sweep_value == t.sweep_value && u.trial == t.trial)
            .unwrap();
        assert_eq!(same.regret, t.regret);
        assert_eq!(same.pull_counts, t.pull_counts);
    }
}

#[test]
fn csv_has_one_row_per_policy_and_point() {
    let cfg = small("exp4", 2);
    let csv = run_experiment(&cfg, &RunOptions::default()).unwrap().csv_string().unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "experiment,policy,sweep_name,sweep_value,metric,mean,stderr,trials,base_seed");
    assert_eq!(lines.len(), 1 + cfg.policies.len() * cfg.sweep.values.len());
}

#[test]
fn gamma_one_runs_match_pb_alg() {
    let env = parallel_env(0.02, 0.3).build().unwrap();
    let nb = env.as_no_backdoor().unwrap();
    for seed in 0..20 {
        let a = run_gamma_nb_alg(nb, 100.0, 1.0, &mut trial_rng(seed)).unwrap();
        let b = run_pb_alg_budgeted(nb, 100.0, 1.0, &mut trial_rng(seed)).unwrap();
        assert_eq!(a.chosen, b.chosen, "seed {seed}");
        assert_eq!(a.candidates, b.candidates, "seed {seed}");
        assert!(a.history.arm_sequence().eq(b.history.arm_sequence()), "seed {seed}");
    }
}
