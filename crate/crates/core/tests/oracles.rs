use causal_bandits::algos::{cucb2_radius, ParentModel};
use causal_bandits::env::{Arm, EnvSpec, Environment, NoBackdoorEnv, RewardModel};
use causal_bandits::harness::{backdoor_env, builtin_experiment, parallel_env};
use causal_bandits::trial_rng;

fn general(env: &Environment) -> &causal_bandits::env::GeneralCausalEnv {
    env.as_general().expect("general environment")
}

#[test]
fn backdoor_env_means() {
    let means = backdoor_env().build().unwrap().true_means().unwrap();
    for (got, want) in means.iter().zip([0.2595, 0.2405, 0.244, 0.254]) {
        assert!((got - want).abs() < 1e-9, "{means:?}");
    }
}

#[test]
fn parent_distributions_match_sampled_frequencies() {
    let env = backdoor_env().build().unwrap();
    let g = general(&env);
    let n = 200_000;
    for (a, arm) in g.arms().iter().enumerate() {
        let exact = &g.parent_distributions()[a];
        let mut counts = vec![0usize; g.parent_tuple_count()];
        let mut rng = trial_rng(40 + a as u64);
        for _ in 0..n {
            let s = g.sample(arm, &mut rng).unwrap();
            counts[g.tuple_index(&s.values)] += 1;
        }
        for (y, (&c, &p)) in counts.iter().zip(exact).enumerate() {
            let freq = c as f64 / n as f64;
            let tol = 4.0 * (p * (1.0 - p) / n as f64).sqrt() + 1e-12;
            assert!((freq - p).abs() <= tol, "arm {a} tuple {y}: {freq} vs {p}");
        }
    }
}

#[test]
fn repeated_intervention_is_idempotent() {
    let env = backdoor_env().build().unwrap();
    let g = general(&env);
    let arm = g.arms()[1].clone();
    let again = Arm::intervene(arm.assignments().to_vec()).unwrap();
    assert_eq!(
        g.interventional_parent_distribution(&arm).unwrap(),
        g.interventional_parent_distribution(&again).unwrap()
    );
}

#[test]
fn observational_mean_of_balanced_pivot_stays_at_base() {
    for p in [0.02, 0.1, 0.3] {
        let env = parallel_env(p, 0.3).build().unwrap();
        let mu0 = env.true_mean(&Arm::Observe).unwrap();
        assert!((mu0 - 0.5).abs() < 1e-12, "p = {p}: {mu0}");
    }
}

#[test]
fn small_parallel_means_by_hand() {
    let env = NoBackdoorEnv::new(vec![0.5, 0.25], RewardModel::Pivot { pivot: 1, mu_hi: 0.9, mu_lo: 0.1 }).unwrap();
    let means: Vec<f64> = env.arms().iter().map(|a| env.true_mean(a).unwrap()).collect();
    let want = [0.3, 0.3, 0.1, 0.9, 0.3];
    for (g, w) in means.iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{means:?}");
    }
}

#[test]
fn same_seed_same_samples() {
    let env = parallel_env(0.1, 0.3).build().unwrap();
    let arm = env.arms()[3].clone();
    let draw = |seed| {
        let mut rng = trial_rng(seed);
        (0..50).map(|_| env.sample(&arm, &mut rng).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(draw(9), draw(9));
    assert_ne!(draw(9), draw(10));
}

#[test]
fn cucb2_radius_never_grows_on_exp4() {
    let cfg = builtin_experiment("exp4").unwrap();
    let EnvSpec::General(_) = &cfg.env else { panic!("exp4 uses a general graph") };
    let env = cfg.env.build().unwrap();
    let model = ParentModel::from_env(general(&env)).unwrap();
    let tuples = model.tuple_count();
    for &zeta in model.zeta() {
        let mut prev = f64::INFINITY;
        for t in 2..=100_000u64 {
            let r = cucb2_radius(tuples, t, zeta);
            assert!(r <= prev + 1e-15, "t = {t}: {r} > {prev}");
            prev = r;
        }
    }
}
