//! Horizon policies that pool rewards by the value of the reward's parents.
//! Both need `P(Pa(Y) = y | do(a))` for every arm up front.

use rand::Rng;

use super::{argmax, History};
use crate::env::GeneralCausalEnv;
use crate::{Error, Result};

/// Known parent distributions with the derived `c_y` and `zeta_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParentModel {
    dists: Vec<Vec<f64>>,
    floor: Vec<f64>,
    zeta: Vec<f64>,
}

impl ParentModel {
    pub fn new(dists: Vec<Vec<f64>>) -> Result<Self> {
        let (floor, zeta) = cucb2_zeta(&dists)?;
        Ok(Self { dists, floor, zeta })
    }

    pub fn from_env(env: &GeneralCausalEnv) -> Result<Self> {
        Self::new(env.parent_distributions().to_vec())
    }

    pub fn arm_count(&self) -> usize {
        self.dists.len()
    }

    pub fn tuple_count(&self) -> usize {
        self.floor.len()
    }

    pub fn dists(&self) -> &[Vec<f64>] {
        &self.dists
    }

    /// `c_y = min_a P(y | do(a))`.
    pub fn floor(&self) -> &[f64] {
        &self.floor
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    /// Smallest positive `c_y`. Reported only.
    pub fn delta(&self) -> f64 {
        self.floor.iter().copied().filter(|&c| c > 0.0).fold(f64::INFINITY, f64::min)
    }
}

/// `c_y = min_a P(y | do(a))` and `zeta_a = sum_{c_y > 0} P(y | do(a)) / c_y`.
/// Every distribution must put mass on the same tuples.
pub fn cucb2_zeta(dists: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let Some(first) = dists.first() else {
        return Err(Error::config("at least one arm is required"));
    };
    let support = |d: &[f64]| d.iter().map(|&p| p > 0.0).collect::<Vec<_>>();
    let base = support(first);
    for (a, d) in dists.iter().enumerate() {
        if d.len() != first.len() {
            return Err(Error::config(format!(
                "arm {a}: parent distribution has {} entries, expected {}",
                d.len(),
                first.len()
            )));
        }
        if support(d) != base {
            return Err(Error::config(format!(
                "arm {a}: parent distribution support differs from arm 0"
            )));
        }
    }
    let floor: Vec<f64> = (0..first.len())
        .map(|y| dists.iter().map(|d| d[y]).fold(f64::INFINITY, f64::min))
        .collect();
    let zeta = dists
        .iter()
        .map(|d| d.iter().zip(&floor).filter(|(_, &c)| c > 0.0).map(|(p, c)| p / c).sum())
        .collect();
    Ok((floor, zeta))
}

/// `sqrt(ln(k^n t^2 / 2) / t) * zeta`, clamped at 0 where the log is negative.
pub fn cucb2_radius(tuples: usize, t: u64, zeta: f64) -> f64 {
    let t = t as f64;
    ((tuples as f64 * t * t / 2.0).ln().max(0.0) / t).sqrt() * zeta
}

/// Per-tuple reward counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Cucb2State {
    counts: Vec<u64>,
    sums: Vec<f64>,
    rounds: u64,
}

impl Cucb2State {
    pub fn new(tuples: usize) -> Self {
        Self { counts: vec![0; tuples], sums: vec![0.0; tuples], rounds: 0 }
    }

    pub fn record(&mut self, tuple: usize, reward: f64) {
        self.counts[tuple] += 1;
        self.sums[tuple] += reward;
        self.rounds += 1;
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `mu_hat_y`, 0 for unseen tuples.
    pub fn tuple_mean(&self, y: usize) -> f64 {
        if self.counts[y] == 0 {
            0.0
        } else {
            self.sums[y] / self.counts[y] as f64
        }
    }

    /// `mu_hat_a = sum_y mu_hat_y P(y | do(a))`.
    pub fn arm_mean(&self, dist: &[f64]) -> f64 {
        dist.iter().enumerate().map(|(y, p)| self.tuple_mean(y) * p).sum()
    }

    pub fn cucb2_scores(&self, model: &ParentModel, t: u64) -> Vec<f64> {
        model
            .dists
            .iter()
            .zip(&model.zeta)
            .map(|(d, &z)| self.arm_mean(d) + cucb2_radius(model.tuple_count(), t, z))
            .collect()
    }

    /// `sum_y min(1, mu_hat_y + sqrt(2 ln t / max(1, N_y))) P(y | do(a))`.
    pub fn cucb_scores(&self, model: &ParentModel, t: u64) -> Vec<f64> {
        let log_t = (t as f64).ln().max(0.0);
        let optimistic: Vec<f64> = (0..self.counts.len())
            .map(|y| {
                let n = self.counts[y].max(1) as f64;
                (self.tuple_mean(y) + (2.0 * log_t / n).sqrt()).min(1.0)
            })
            .collect();
        model
            .dists
            .iter()
            .map(|d| d.iter().zip(&optimistic).map(|(p, u)| p * u).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentUcbKind {
    Cucb2,
    Cucb,
}

/// Round robin over the arms, then greedy on the chosen index.
#[derive(Debug, Clone)]
pub struct ParentUcb<'e> {
    env: &'e GeneralCausalEnv,
    model: &'e ParentModel,
    kind: ParentUcbKind,
    state: Cucb2State,
    history: History,
    values: Vec<u32>,
}

impl<'e> ParentUcb<'e> {
    pub fn new(env: &'e GeneralCausalEnv, model: &'e ParentModel, kind: ParentUcbKind) -> Result<Self> {
        if model.arm_count() != env.arms().len() || model.tuple_count() != env.parent_tuple_count() {
            return Err(Error::config(format!(
                "parent model is {}x{} but the environment has {} arms and {} parent tuples",
                model.arm_count(),
                model.tuple_count(),
                env.arms().len(),
                env.parent_tuple_count()
            )));
        }
        Ok(Self {
            env,
            model,
            kind,
            state: Cucb2State::new(model.tuple_count()),
            history: History::default(),
            values: vec![0; env.node_count()],
        })
    }

    pub fn state(&self) -> &Cucb2State {
        &self.state
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn into_history(self) -> History {
        self.history
    }

    pub fn scores(&self) -> Vec<f64> {
        let t = self.state.rounds;
        match self.kind {
            ParentUcbKind::Cucb2 => self.state.cucb2_scores(self.model, t),
            ParentUcbKind::Cucb => self.state.cucb_scores(self.model, t),
        }
    }

    pub fn next_arm(&self) -> usize {
        let played = self.state.rounds as usize;
        if played < self.model.arm_count() {
            played
        } else {
            argmax(&self.scores())
        }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let arm = self.next_arm();
        let reward = self.env.draw(&self.env.arms()[arm], rng, &mut self.values);
        self.state.record(self.env.tuple_index(&self.values), reward);
        self.history.push(arm, 1.0, reward);
        arm
    }
}

fn run<R: Rng + ?Sized>(
    env: &GeneralCausalEnv,
    model: &ParentModel,
    kind: ParentUcbKind,
    horizon: u64,
    rng: &mut R,
) -> Result<History> {
    let mut alg = ParentUcb::new(env, model, kind)?;
    for _ in 0..horizon {
        alg.step(rng);
    }
    Ok(alg.into_history())
}

pub fn run_cucb2<R: Rng + ?Sized>(
    env: &GeneralCausalEnv,
    model: &ParentModel,
    horizon: u64,
    rng: &mut R,
) -> Result<History> {
    run(env, model, ParentUcbKind::Cucb2, horizon, rng)
}

pub fn run_cucb_baseline<R: Rng + ?Sized>(
    env: &GeneralCausalEnv,
    model: &ParentModel,
    horizon: u64,
    rng: &mut R,
) -> Result<History> {
    run(env, model, ParentUcbKind::Cucb, horizon, rng)
}
