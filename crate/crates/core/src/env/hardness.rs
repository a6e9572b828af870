//! The `m(p)` hardness index of a no-backdoor instance.

use crate::{Error, Result};

/// Smallest `tau` in `2..=M` such that at most `tau` nodes have
/// `min(p_i, 1 - p_i) < 1 / tau`. Returns `M` when no smaller `tau` qualifies.
///
/// `p` holds `P(X_i = 1)` per node. Values on the closed interval `[0, 1]` are
/// accepted so empirical estimates can be passed straight in.
pub fn m_index(p: &[f64]) -> Result<usize> {
    let m = p.len();
    if m < 2 {
        return Err(Error::config(format!("m(p) needs at least two nodes, got {m}")));
    }
    if let Some(bad) = p.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::config(format!("probability {bad} outside [0, 1]")));
    }
    let rarest: Vec<f64> = p.iter().map(|&q| q.min(1.0 - q)).collect();
    for tau in 2..=m {
        let threshold = 1.0 / tau as f64;
        let rare = rarest.iter().filter(|&&q| q < threshold).count();
        if rare <= tau {
            return Ok(tau);
        }
    }
    Ok(m)
}
