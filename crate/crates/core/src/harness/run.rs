use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, PolicyKind, PolicySpec, SweepPoint, SweepVariable};
use super::metrics::{
    budgeted_oracle_value, cumulative_regret_budgeted_from_means, cumulative_regret_horizon_from_means,
    mean_stderr, simple_regret_from_means,
};
use crate::algos::{
    run_crm_nb_alg, run_cucb2, run_cucb_baseline, run_fkube, run_gamma_nb_alg, run_obs_alg,
    run_pb_alg_budgeted, History,
};
use crate::env::Environment;
use crate::{trial_rng, Error, Result};

/// One trial of one policy at one grid value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub policy: String,
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    /// Expected regret under the configured metric.
    pub regret: f64,
    /// Same metric computed from realized rewards; absent for simple regret.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realized_regret: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_arm: Option<usize>,
    pub rounds: usize,
    pub total_cost: f64,
    pub pull_counts: Vec<u64>,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateResult {
    pub experiment: String,
    pub policy: String,
    pub sweep_name: String,
    pub sweep_value: f64,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
    pub base_seed: u64,
}

impl AggregateResult {
    /// Standard error is meaningless for a single trial and reported as 0.
    pub fn stderr_is_degenerate(&self) -> bool {
        self.trials < 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<AggregateResult>,
    pub trials: Vec<TrialResult>,
}

impl ExperimentOutput {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn trials_json(&self) -> String {
        serde_json::to_string_pretty(&self.trials).expect("trial results serialize")
    }
}

/// Worker count and progress reporting.
#[derive(Default)]
pub struct RunOptions<'a> {
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    /// Called with `(finished, total)` after each unit of work.
    pub progress: Option<&'a (dyn Fn(usize, usize) + Sync)>,
}

/// A unit of work: one policy, one seed, and the grid points it covers.
/// Horizon sweeps are served by a single run to the largest horizon, since a
/// horizon-free policy's first `T` rounds do not depend on the stopping time.
struct Job {
    policy: usize,
    trial: usize,
    points: Vec<usize>,
}

pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentOutput> {
    let points = config.validate()?;
    let prefix_sweep = config.sweep.variable == SweepVariable::Horizon;
    let mut jobs = Vec::new();
    for policy in 0..config.policies.len() {
        if prefix_sweep {
            for trial in 0..config.trials {
                jobs.push(Job { policy, trial, points: (0..points.len()).collect() });
            }
        } else {
            for p in 0..points.len() {
                for trial in 0..config.trials {
                    jobs.push(Job { policy, trial, points: vec![p] });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let done = AtomicUsize::new(0);
    let total = jobs.len();
    let per_job: Vec<Vec<TrialResult>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let r = run_job(config, &points, job);
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(progress) = options.progress {
                    progress(n, total);
                }
                r
            })
            .collect::<Result<_>>()
    })?;

    // Order rows by policy, then grid value, then trial.
    let mut trials: Vec<TrialResult> = per_job.into_iter().flatten().collect();
    let policy_rank = |label: &str| config.policies.iter().position(|p| p.label() == label);
    trials.sort_by(|a, b| {
        policy_rank(&a.policy)
            .cmp(&policy_rank(&b.policy))
            .then(a.sweep_value.total_cmp(&b.sweep_value))
            .then(a.trial.cmp(&b.trial))
    });

    let rows = trials
        .chunk_by(|a, b| a.policy == b.policy && a.sweep_value == b.sweep_value)
        .map(|group| {
            let regrets: Vec<f64> = group.iter().map(|t| t.regret).collect();
            let (mean, stderr) = mean_stderr(&regrets);
            AggregateResult {
                experiment: config.name.clone(),
                policy: group[0].policy.clone(),
                sweep_name: config.sweep.variable.name().to_string(),
                sweep_value: group[0].sweep_value,
                metric: config.metric.name().to_string(),
                mean,
                stderr,
                trials: group.len(),
                base_seed: config.base_seed,
            }
        })
        .collect();
    Ok(ExperimentOutput { rows, trials })
}

fn run_job(config: &ExperimentConfig, points: &[SweepPoint], job: &Job) -> Result<Vec<TrialResult>> {
    let spec = &config.policies[job.policy];
    let seed = config.base_seed.wrapping_add(job.trial as u64);
    let mut rng = trial_rng(seed);
    let result = |point: &SweepPoint, history: &History, regret, realized, chosen| TrialResult {
        policy: spec.label().to_string(),
        sweep_value: point.value,
        trial: job.trial,
        seed,
        regret,
        realized_regret: realized,
        chosen_arm: chosen,
        rounds: history.rounds(),
        total_cost: history.total_cost(),
        pull_counts: history.pull_counts(point.means.len()),
    };

    match spec.kind {
        PolicyKind::CUcb2 | PolicyKind::CUcb => {
            let last = &points[*job.points.last().expect("job covers a point")];
            let (Environment::General(env), Some(model)) = (&last.env, &last.parent_model) else {
                unreachable!("validated as a general environment")
            };
            let horizon = last.horizon.expect("validated horizon");
            let history = if spec.kind == PolicyKind::CUcb2 {
                run_cucb2(env, model, horizon, &mut rng)?
            } else {
                run_cucb_baseline(env, model, horizon, &mut rng)?
            };
            Ok(job
                .points
                .iter()
                .map(|&p| {
                    let point = &points[p];
                    let t = point.horizon.expect("validated horizon") as usize;
                    let pulls = history.prefix(t);
                    let regret = cumulative_regret_horizon_from_means(&point.means, pulls);
                    let best = point.means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let realized = t as f64 * best - pulls.iter().map(|p| p.reward).sum::<f64>();
                    let mut h = History::default();
                    for p in pulls {
                        h.push(p.arm, p.cost, p.reward);
                    }
                    result(point, &h, regret, Some(realized), None)
                })
                .collect())
        }
        kind => {
            let point = &points[job.points[0]];
            let Environment::NoBackdoor(env) = &point.env else {
                unreachable!("validated as a no-backdoor environment")
            };
            let budget = point.budget.expect("validated budget");
            let gamma = effective_gamma(spec, point);
            let trial = match kind {
                PolicyKind::ObsAlg | PolicyKind::GammaNbAlg | PolicyKind::PbAlg => {
                    let run = match kind {
                        PolicyKind::ObsAlg => run_obs_alg(env, budget, gamma, &mut rng)?,
                        PolicyKind::GammaNbAlg => run_gamma_nb_alg(env, budget, gamma, &mut rng)?,
                        _ => run_pb_alg_budgeted(env, budget, gamma, &mut rng)?,
                    };
                    let regret = simple_regret_from_means(&point.means, run.chosen);
                    result(point, &run.history, regret, None, Some(run.chosen))
                }
                _ => {
                    let history = if kind == PolicyKind::CrmNbAlg {
                        run_crm_nb_alg(env, budget, gamma, &mut rng)?
                    } else {
                        run_fkube(env, budget, gamma, &mut rng)?
                    };
                    let regret =
                        cumulative_regret_budgeted_from_means(&point.means, history.pulls(), budget, gamma);
                    let realized =
                        budgeted_oracle_value(&point.means, budget, gamma) - history.total_reward();
                    result(point, &history, regret, Some(realized), None)
                }
            };
            Ok(vec![trial])
        }
    }
}

fn effective_gamma(spec: &PolicySpec, point: &SweepPoint) -> f64 {
    point.gamma.unwrap_or(spec.gamma)
}
