//! Causal bandit simulation.
//!
//! The crate is split into three layers:
//!
//! - [`env`]: discrete causal environments (no-backdoor Bernoulli models and
//!   general DAGs with conditional probability tables), sampling under
//!   observation and intervention, and exact interventional inference.
//! - [`algos`]: budgeted best-arm and cumulative-regret policies for
//!   no-backdoor graphs, and horizon-free UCB policies that exploit known
//!   parent distributions of the reward node.
//! - [`harness`]: seeded trial execution, regret metrics, aggregation and the
//!   built-in experiment configurations.
//!
//! Every random draw goes through a caller-owned [`TrialRng`], so a
//! `(config, seed)` pair always reproduces the same pull sequence.

pub mod algos;
pub mod env;
mod error;
pub mod harness;

pub use error::{Error, Result};

/// Deterministic generator used for every trial.
pub type TrialRng = rand_chacha::ChaCha8Rng;

/// Builds the generator for one trial from its seed.
pub fn trial_rng(seed: u64) -> TrialRng {
    use rand::SeedableRng;
    TrialRng::seed_from_u64(seed)
}
