//! Regret definitions and the concentration bound used to size statistical
//! tests. All regrets use exact arm means, never realized rewards.

use crate::algos::Pull;
use crate::env::Environment;
use crate::Result;

fn best(means: &[f64]) -> f64 {
    means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn collected(means: &[f64], pulls: &[Pull]) -> f64 {
    pulls.iter().map(|p| means[p.arm]).sum()
}

/// `max_a mu_a - mu_chosen`.
pub fn simple_regret_from_means(means: &[f64], chosen: usize) -> f64 {
    best(means) - means[chosen]
}

pub fn simple_regret(env: &Environment, chosen: usize) -> Result<f64> {
    Ok(simple_regret_from_means(&env.true_means()?, chosen))
}

/// Value of the best single-arm plan on a no-backdoor graph: observe for the
/// whole budget, or intervene `floor(B / gamma)` times on the best arm.
/// `means` is in canonical order with the observational arm last.
pub fn budgeted_oracle_value(means: &[f64], budget: f64, gamma: f64) -> f64 {
    let (observe, interventions) = means.split_last().expect("at least the observational arm");
    let best_do = best(interventions);
    let by_intervening = if interventions.is_empty() { 0.0 } else { (budget / gamma).floor() * best_do };
    (budget * observe).max(by_intervening)
}

/// `G_B - sum_t mu_{a_t}`.
pub fn cumulative_regret_budgeted_from_means(means: &[f64], pulls: &[Pull], budget: f64, gamma: f64) -> f64 {
    budgeted_oracle_value(means, budget, gamma) - collected(means, pulls)
}

pub fn cumulative_regret_budgeted(
    env: &Environment,
    pulls: &[Pull],
    budget: f64,
    gamma: f64,
) -> Result<f64> {
    Ok(cumulative_regret_budgeted_from_means(&env.true_means()?, pulls, budget, gamma))
}

/// `T * max_a mu_a - sum_t mu_{a_t}` with `T = pulls.len()`.
pub fn cumulative_regret_horizon_from_means(means: &[f64], pulls: &[Pull]) -> f64 {
    pulls.len() as f64 * best(means) - collected(means, pulls)
}

pub fn cumulative_regret_horizon(env: &Environment, pulls: &[Pull]) -> Result<f64> {
    Ok(cumulative_regret_horizon_from_means(&env.true_means()?, pulls))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoeffdingForm {
    /// Deviation of a sum of `T` variables in `[0, 1]`: `exp(-2 eps^2 / T)`.
    Sum,
    /// Deviation of their mean: `exp(-2 eps^2 T)`.
    Mean,
}

/// One-sided Chernoff-Hoeffding tail bound.
pub fn hoeffding_bound(epsilon: f64, t: f64, form: HoeffdingForm) -> f64 {
    let e2 = epsilon * epsilon;
    match form {
        HoeffdingForm::Sum => (-2.0 * e2 / t).exp(),
        HoeffdingForm::Mean => (-2.0 * e2 * t).exp(),
    }
}

/// Mean and standard error (`sample std / sqrt(n)`). Values are summed in
/// sorted order so the result does not depend on trial order. One value gives
/// a standard error of 0.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let mut dev: Vec<f64> = sorted.iter().map(|v| (v - mean) * (v - mean)).collect();
    dev.sort_by(f64::total_cmp);
    let var = dev.iter().sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
