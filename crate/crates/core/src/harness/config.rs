use serde::{Deserialize, Serialize};

use crate::algos::ParentModel;
use crate::env::{EnvSpec, Environment};
use crate::{Error, Result};

/// Policy families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "obs_alg")]
    ObsAlg,
    #[serde(rename = "gamma_nb_alg")]
    GammaNbAlg,
    #[serde(rename = "pb_alg")]
    PbAlg,
    #[serde(rename = "crm_nb_alg")]
    CrmNbAlg,
    #[serde(rename = "f_kube")]
    FKube,
    #[serde(rename = "c_ucb2")]
    CUcb2,
    #[serde(rename = "c_ucb")]
    CUcb,
}

impl PolicyKind {
    pub fn default_label(self) -> &'static str {
        match self {
            PolicyKind::ObsAlg => "OBS-ALG",
            PolicyKind::GammaNbAlg => "gamma-NB-ALG",
            PolicyKind::PbAlg => "PB-ALG",
            PolicyKind::CrmNbAlg => "CRM-NB-ALG",
            PolicyKind::FKube => "F-KUBE",
            PolicyKind::CUcb2 => "C-UCB-2",
            PolicyKind::CUcb => "C-UCB",
        }
    }

    /// The metric this policy's output is scored with.
    pub fn metric(self) -> Metric {
        match self {
            PolicyKind::ObsAlg | PolicyKind::GammaNbAlg | PolicyKind::PbAlg => Metric::SimpleRegret,
            PolicyKind::CrmNbAlg | PolicyKind::FKube => Metric::CumulativeRegretBudgeted,
            PolicyKind::CUcb2 | PolicyKind::CUcb => Metric::CumulativeRegretHorizon,
        }
    }

    /// Smallest budget the policy accepts on an `m`-node no-backdoor graph.
    /// The flag is true when the bound itself is excluded.
    fn min_budget(self, gamma: f64, m: usize) -> (f64, bool) {
        let rr = 2.0 * gamma * m as f64 + 1.0;
        match self {
            PolicyKind::ObsAlg => (1.0, false),
            PolicyKind::GammaNbAlg => (2.0, false),
            PolicyKind::PbAlg => (1.0 + gamma, false),
            PolicyKind::CrmNbAlg => (rr, true),
            PolicyKind::FKube => (rr, false),
            PolicyKind::CUcb2 | PolicyKind::CUcb => (0.0, false),
        }
    }
}

fn unit_gamma() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Intervention cost; ignored by horizon policies.
    #[serde(default = "unit_gamma")]
    pub gamma: f64,
    /// Name in the output; defaults to the policy family name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind, gamma: f64) -> Self {
        Self { kind, gamma, label: None }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.kind.default_label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SimpleRegret,
    CumulativeRegretBudgeted,
    CumulativeRegretHorizon,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::SimpleRegret => "simple_regret",
            Metric::CumulativeRegretBudgeted => "cumulative_regret_budgeted",
            Metric::CumulativeRegretHorizon => "cumulative_regret_horizon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Budget,
    Horizon,
    Gamma,
    /// Sets `P(X_i = 1)` of every node listed in `targets`.
    MinProb,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Budget => "budget",
            SweepVariable::Horizon => "horizon",
            SweepVariable::Gamma => "gamma",
            SweepVariable::MinProb => "min_prob",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// Node indices rewritten by a `min_prob` sweep.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<usize>,
}

fn one() -> usize {
    1
}

/// A complete experiment: one environment, several policies compared over a
/// one-dimensional grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub env: EnvSpec,
    pub policies: Vec<PolicySpec>,
    pub sweep: Sweep,
    pub metric: Metric,
    /// Fixed budget when the sweep is not over the budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    /// Fixed horizon when the sweep is not over the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Trial count used by `--full-scale`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_scale_trials: Option<usize>,
}

/// Everything that varies along the sweep, resolved for one grid value.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub env: Environment,
    pub means: Vec<f64>,
    pub budget: Option<f64>,
    pub horizon: Option<u64>,
    /// Overrides every policy's gamma.
    pub gamma: Option<f64>,
    pub parent_model: Option<ParentModel>,
}

fn bad(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Environment spec with the sweep applied for grid value `value`.
    pub fn env_spec_at(&self, value: f64) -> Result<EnvSpec> {
        let mut spec = self.env.clone();
        if self.sweep.variable == SweepVariable::MinProb {
            let EnvSpec::NoBackdoor(nb) = &mut spec else {
                return Err(bad("sweep", "min_prob sweeps need a no_backdoor environment"));
            };
            let m = nb.probs.len();
            for &i in &self.sweep.targets {
                let slot = nb.probs.get_mut(i).ok_or_else(|| {
                    bad("sweep", format_args!("target node {i} out of range (M = {m})"))
                })?;
                *slot = value;
            }
        }
        Ok(spec)
    }

    /// Builds the environment and fixed parameters for one grid value.
    pub fn point(&self, value: f64) -> Result<SweepPoint> {
        let env = self.env_spec_at(value)?.build()?;
        let means = env.true_means()?;
        let (mut budget, mut horizon, mut gamma) = (self.budget, self.horizon, None);
        match self.sweep.variable {
            SweepVariable::Budget => budget = Some(value),
            SweepVariable::Horizon => horizon = Some(value as u64),
            SweepVariable::Gamma => gamma = Some(value),
            SweepVariable::MinProb => {}
        }
        let parent_model = match &env {
            Environment::General(g) => Some(ParentModel::from_env(g)?),
            Environment::NoBackdoor(_) => None,
        };
        Ok(SweepPoint { value, env, means, budget, horizon, gamma, parent_model })
    }

    /// Checks the whole configuration and resolves every grid point, so no
    /// trial starts on a config that would fail later.
    pub fn validate(&self) -> Result<Vec<SweepPoint>> {
        if self.name.is_empty() {
            return Err(bad("name", "must not be empty"));
        }
        if self.trials == 0 {
            return Err(bad("trials", "must be at least 1"));
        }
        if self.full_scale_trials == Some(0) {
            return Err(bad("full_scale_trials", "must be at least 1"));
        }
        self.validate_grid()?;
        self.validate_policies()?;

        let mut points = Vec::with_capacity(self.sweep.values.len());
        for &v in &self.sweep.values {
            let point = self.point(v)?;
            self.validate_point(&point)?;
            points.push(point);
        }
        Ok(points)
    }

    fn validate_grid(&self) -> Result<()> {
        let values = &self.sweep.values;
        if values.is_empty() {
            return Err(bad("sweep", "values must not be empty"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(bad("sweep", format_args!("value {v} is not positive and finite")));
        }
        if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(bad(
                "sweep",
                format_args!("values must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
        match self.sweep.variable {
            SweepVariable::Horizon => {
                if let Some(v) = values.iter().find(|v| v.fract() != 0.0) {
                    return Err(bad("sweep", format_args!("horizon {v} is not an integer")));
                }
            }
            SweepVariable::Gamma => {
                if let Some(v) = values.iter().find(|v| **v < 1.0) {
                    return Err(bad("sweep", format_args!("gamma {v} is below 1")));
                }
            }
            SweepVariable::MinProb => {
                if self.sweep.targets.is_empty() {
                    return Err(bad("sweep", "min_prob sweeps need at least one target node"));
                }
                if let Some(v) = values.iter().find(|v| **v >= 1.0) {
                    return Err(bad("sweep", format_args!("probability {v} is not below 1")));
                }
            }
            SweepVariable::Budget => {}
        }
        if self.sweep.variable != SweepVariable::MinProb && !self.sweep.targets.is_empty() {
            return Err(bad("sweep", "targets only apply to min_prob sweeps"));
        }
        Ok(())
    }

    fn validate_policies(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(bad("policies", "at least one policy is required"));
        }
        let mut seen = std::collections::HashSet::new();
        for p in &self.policies {
            if !seen.insert(p.label()) {
                return Err(bad("policies", format_args!("duplicate label {:?}", p.label())));
            }
            if !(p.gamma.is_finite() && p.gamma >= 1.0) {
                return Err(bad("policies", format_args!("{}: gamma {} is below 1", p.label(), p.gamma)));
            }
            if p.kind.metric() != self.metric {
                return Err(bad(
                    "metric",
                    format_args!("{} is scored with {}, not {}", p.label(), p.kind.metric().name(), self.metric.name()),
                ));
            }
        }
        let horizon_metric = self.metric == Metric::CumulativeRegretHorizon;
        let sweep_budget = self.sweep.variable == SweepVariable::Budget;
        let sweep_horizon = self.sweep.variable == SweepVariable::Horizon;
        if horizon_metric {
            if sweep_budget || self.sweep.variable == SweepVariable::Gamma {
                return Err(bad("sweep", "horizon policies have no budget or intervention cost to sweep"));
            }
            if !sweep_horizon && self.horizon.is_none() {
                return Err(bad("horizon", "required unless the sweep is over the horizon"));
            }
            if self.horizon == Some(0) {
                return Err(bad("horizon", "must be at least 1"));
            }
        } else {
            if sweep_horizon {
                return Err(bad("sweep", "budgeted policies have no horizon to sweep"));
            }
            if !sweep_budget && self.budget.is_none() {
                return Err(bad("budget", "required unless the sweep is over the budget"));
            }
            if let Some(b) = self.budget {
                if !(b.is_finite() && b > 0.0) {
                    return Err(bad("budget", format_args!("{b} is not positive and finite")));
                }
            }
        }
        Ok(())
    }

    fn validate_point(&self, point: &SweepPoint) -> Result<()> {
        let at = |msg: String| {
            bad("policies", format_args!("at {} = {}: {msg}", self.sweep.variable.name(), point.value))
        };
        for p in &self.policies {
            match (p.kind.metric(), &point.env) {
                (Metric::CumulativeRegretHorizon, Environment::General(_)) => {}
                (Metric::CumulativeRegretHorizon, Environment::NoBackdoor(_)) => {
                    return Err(at(format!("{} needs a general environment with known parent distributions", p.label())));
                }
                (_, Environment::General(_)) => {
                    return Err(at(format!("{} needs a no_backdoor environment", p.label())));
                }
                (_, Environment::NoBackdoor(env)) => {
                    let gamma = point.gamma.unwrap_or(p.gamma);
                    let budget = point.budget.expect("checked in validate_policies");
                    let (min, strict) = p.kind.min_budget(gamma, env.node_count());
                    if budget < min || (strict && budget <= min) {
                        let op = if strict { ">" } else { ">=" };
                        return Err(at(format!(
                            "{} needs budget {op} {min} with gamma = {gamma}, got {budget}",
                            p.label()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies the command-line overrides.
    pub fn with_overrides(mut self, trials: Option<usize>, seed: Option<u64>, full_scale: bool) -> Self {
        if full_scale {
            if let Some(n) = self.full_scale_trials {
                self.trials = n;
            }
        }
        if let Some(n) = trials {
            self.trials = n;
        }
        if let Some(s) = seed {
            self.base_seed = s;
        }
        self
    }
}
