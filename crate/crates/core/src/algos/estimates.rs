use crate::env::{NoBackdoorEnv, Sample};

/// Running sums over observational rounds of a no-backdoor environment.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTally {
    rounds: u64,
    reward_sum: f64,
    counts: Vec<[u64; 2]>,
    sums: Vec<[f64; 2]>,
}

impl ObservationTally {
    pub fn new(nodes: usize) -> Self {
        Self { rounds: 0, reward_sum: 0.0, counts: vec![[0; 2]; nodes], sums: vec![[0.0; 2]; nodes] }
    }

    pub fn record(&mut self, values: &[u32], reward: f64) {
        self.rounds += 1;
        self.reward_sum += reward;
        for ((c, s), &v) in self.counts.iter_mut().zip(&mut self.sums).zip(values) {
            c[v as usize] += 1;
            s[v as usize] += reward;
        }
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn estimates(&self) -> ObservationalEstimates {
        let ratio = |s: f64, n: u64| if n == 0 { 0.0 } else { s / n as f64 };
        ObservationalEstimates {
            rounds: self.rounds,
            mu_observe: ratio(self.reward_sum, self.rounds),
            mu: self
                .sums
                .iter()
                .zip(&self.counts)
                .map(|(s, c)| [ratio(s[0], c[0]), ratio(s[1], c[1])])
                .collect(),
            p_hat: self
                .counts
                .iter()
                .map(|c| [ratio(c[0] as f64, self.rounds), ratio(c[1] as f64, self.rounds)])
                .collect(),
        }
    }
}

/// Ratio estimators from observational rounds. Empty denominators give 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationalEstimates {
    pub rounds: u64,
    pub mu_observe: f64,
    /// `mu[i][x]` estimates the mean of `do(X_i = x)`.
    pub mu: Vec<[f64; 2]>,
    /// `p_hat[i][x]` estimates `P(X_i = x)`.
    pub p_hat: Vec<[f64; 2]>,
}

impl ObservationalEstimates {
    /// Estimates in canonical arm order, observational arm last.
    pub fn arm_means(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.mu.iter().flatten().copied().collect();
        out.push(self.mu_observe);
        out
    }

    /// `min_{i,x} p_hat[i][x]`.
    pub fn min_p_hat(&self) -> f64 {
        self.p_hat.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Estimated `P(X_i = 1)` per node, the input to the hardness index.
    pub fn p_hat_ones(&self) -> Vec<f64> {
        self.p_hat.iter().map(|p| p[1]).collect()
    }

    /// Interventional arms whose value is rare: `p_hat[i][x] < 1 / m_hat`.
    pub fn rare_arms(&self, m_hat: usize) -> Vec<usize> {
        let cut = 1.0 / m_hat as f64;
        self.p_hat
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                (0..2u32).filter(move |&x| p[x as usize] < cut).map(move |x| NoBackdoorEnv::arm_index(i, x))
            })
            .collect()
    }
}

/// Estimates from the observational samples in `samples`; interventional
/// samples are ignored.
pub fn estimate_from_observations(nodes: usize, samples: &[Sample]) -> ObservationalEstimates {
    let mut tally = ObservationTally::new(nodes);
    for s in samples.iter().filter(|s| s.arm.is_observe()) {
        tally.record(&s.values, s.reward);
    }
    tally.estimates()
}
