//! Experiment harness: configuration, seeded trial execution, regret metrics
//! and aggregation into the CSV schema
//! `experiment,policy,sweep_name,sweep_value,metric,mean,stderr,trials,base_seed`.
//!
//! Trial `i` of every policy and grid value is seeded with `base_seed + i`, so
//! policies are compared on common random numbers and a run is reproducible
//! regardless of the worker count.

mod builtin;
mod config;
pub mod metrics;
mod report;
mod run;

pub use builtin::{backdoor_env, builtin_experiment, parallel_env, BUILTIN_NAMES};
pub use config::{ExperimentConfig, Metric, PolicyKind, PolicySpec, Sweep, SweepPoint, SweepVariable};
pub use metrics::{
    cumulative_regret_budgeted, cumulative_regret_horizon, hoeffding_bound, mean_stderr, simple_regret,
    HoeffdingForm,
};
pub use report::inspect_env;
pub use run::{run_experiment, AggregateResult, ExperimentOutput, RunOptions, TrialResult};
