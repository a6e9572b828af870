//! Simple-regret policies: a fixed observation phase, optionally followed by
//! targeted interventions on rarely observed values.

use rand::Rng;

use super::{argmax, check_gamma, hardness, Budget, History, ObservationTally};
use crate::env::NoBackdoorEnv;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    ObserveMore,
    InterveneSet,
}

/// Outcome of a best-arm identification run.
#[derive(Debug, Clone, PartialEq)]
pub struct BestArmRun {
    pub chosen: usize,
    pub history: History,
    /// Final estimate per arm, canonical order.
    pub estimates: Vec<f64>,
    /// Branch decided after the first phase (`None` for OBS-ALG).
    pub branch: Option<Branch>,
    /// True when the intervene branch was chosen but had nothing to spend on.
    pub fell_back: bool,
    /// Rare-value arms targeted in the second phase.
    pub candidates: Vec<usize>,
    pub p_hat_min: Option<f64>,
    pub m_hat: Option<usize>,
}

/// Keep observing iff `p_hat * m_hat >= 1 / gamma`.
pub fn gamma_nb_branch(p_hat: f64, m_hat: usize, gamma: f64) -> Branch {
    if p_hat * m_hat as f64 >= 1.0 / gamma {
        Branch::ObserveMore
    } else {
        Branch::InterveneSet
    }
}

struct Runner<'e, R: ?Sized> {
    env: &'e NoBackdoorEnv,
    rng: &'e mut R,
    budget: Budget,
    history: History,
    values: Vec<u32>,
}

impl<'e, R: Rng + ?Sized> Runner<'e, R> {
    fn new(env: &'e NoBackdoorEnv, total: f64, gamma: f64, rng: &'e mut R) -> Result<Self> {
        Ok(Self {
            env,
            rng,
            budget: Budget::new(total, gamma)?,
            history: History::default(),
            values: vec![0; env.node_count()],
        })
    }

    fn observe(&mut self, n: u64, tally: &mut ObservationTally) {
        for _ in 0..n {
            let reward = self.env.draw(None, self.rng, &mut self.values);
            tally.record(&self.values, reward);
            let cost = self.budget.charge(true);
            self.history.push(self.env.observe_index(), cost, reward);
        }
    }

    fn observe_rest(&mut self, tally: &mut ObservationTally) {
        while self.budget.can_afford(true) {
            self.observe(1, tally);
        }
    }

    /// Pulls `arm` `n` times and returns the empirical mean.
    fn intervene(&mut self, arm: usize, n: u64) -> f64 {
        let forced = self.env.forced_by_index(arm);
        let mut sum = 0.0;
        for _ in 0..n {
            let reward = self.env.draw(forced, self.rng, &mut self.values);
            sum += reward;
            let cost = self.budget.charge(false);
            self.history.push(arm, cost, reward);
        }
        sum / n as f64
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::config(msg()))
    }
}

/// Spends the whole budget on observations and picks the best estimate.
pub fn run_obs_alg<R: Rng + ?Sized>(
    env: &NoBackdoorEnv,
    budget: f64,
    gamma: f64,
    rng: &mut R,
) -> Result<BestArmRun> {
    require(budget >= 1.0, || format!("OBS-ALG needs budget >= 1, got {budget}"))?;
    let mut run = Runner::new(env, budget, gamma, rng)?;
    let mut tally = ObservationTally::new(env.node_count());
    run.observe_rest(&mut tally);
    let estimates = tally.estimates().arm_means();
    Ok(BestArmRun {
        chosen: argmax(&estimates),
        history: run.history,
        estimates,
        branch: None,
        fell_back: false,
        candidates: Vec::new(),
        p_hat_min: None,
        m_hat: None,
    })
}

/// Half the budget on observations, then either keep observing or split the
/// rest over the rare-value arms.
pub fn run_gamma_nb_alg<R: Rng + ?Sized>(
    env: &NoBackdoorEnv,
    budget: f64,
    gamma: f64,
    rng: &mut R,
) -> Result<BestArmRun> {
    require(budget >= 2.0, || format!("gamma-NB-ALG needs budget >= 2, got {budget}"))?;
    check_gamma(gamma)?;
    let mut run = Runner::new(env, budget, gamma, rng)?;
    let mut tally = ObservationTally::new(env.node_count());
    run.observe((budget / 2.0).floor() as u64, &mut tally);

    let first = tally.estimates();
    let p_hat = first.min_p_hat();
    let m_hat = hardness(&first.p_hat_ones());
    let branch = gamma_nb_branch(p_hat, m_hat, gamma);
    let candidates = match branch {
        Branch::InterveneSet => first.rare_arms(m_hat),
        Branch::ObserveMore => Vec::new(),
    };
    let per_arm = if candidates.is_empty() {
        0
    } else {
        (budget / (2.0 * gamma * candidates.len() as f64)).floor() as u64
    };

    let mut fell_back = false;
    let estimates = if branch == Branch::InterveneSet && per_arm > 0 {
        let mut est = first.arm_means();
        for &a in &candidates {
            est[a] = run.intervene(a, per_arm);
        }
        est
    } else {
        fell_back = branch == Branch::InterveneSet;
        run.observe_rest(&mut tally);
        tally.estimates().arm_means()
    };

    Ok(BestArmRun {
        chosen: argmax(&estimates),
        history: run.history,
        estimates,
        branch: Some(branch),
        fell_back,
        candidates,
        p_hat_min: Some(p_hat),
        m_hat: Some(m_hat),
    })
}

/// Parallel-bandit baseline adapted to costs: `floor(B / (1 + gamma))`
/// observations, then the remaining budget split over the rare-value arms.
pub fn run_pb_alg_budgeted<R: Rng + ?Sized>(
    env: &NoBackdoorEnv,
    budget: f64,
    gamma: f64,
    rng: &mut R,
) -> Result<BestArmRun> {
    check_gamma(gamma)?;
    require(budget >= 1.0 + gamma, || {
        format!("PB-ALG needs budget >= 1 + gamma = {}, got {budget}", 1.0 + gamma)
    })?;
    let mut run = Runner::new(env, budget, gamma, rng)?;
    let mut tally = ObservationTally::new(env.node_count());
    let n_obs = (budget / (1.0 + gamma)).floor();
    run.observe(n_obs as u64, &mut tally);

    let first = tally.estimates();
    let p_hat = first.min_p_hat();
    let m_hat = hardness(&first.p_hat_ones());
    let candidates = first.rare_arms(m_hat);
    let mut estimates = first.arm_means();
    if !candidates.is_empty() {
        let per_arm = ((budget - n_obs) / (gamma * candidates.len() as f64)).floor() as u64;
        if per_arm > 0 {
            for &a in &candidates {
                estimates[a] = run.intervene(a, per_arm);
            }
        }
    }

    Ok(BestArmRun {
        chosen: argmax(&estimates),
        history: run.history,
        estimates,
        branch: None,
        fell_back: false,
        candidates,
        p_hat_min: Some(p_hat),
        m_hat: Some(m_hat),
    })
}
