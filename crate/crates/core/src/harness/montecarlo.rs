use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::netmodel::Request;
use crate::scheduler::RoutingOutcome;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Simulates the swapping stage `trials` times. Every allocated pair on a
/// path of length `d` survives only if all of its `d - 1` swaps succeed;
/// a trial scores the weighted count of surviving pairs.
pub fn swap_monte_carlo<R: Rng + ?Sized>(
    outcome: &RoutingOutcome,
    requests: &[Request],
    p_in: f64,
    trials: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p_in) {
        return Err(invalid("p_in", "must lie in [0, 1]"));
    }
    let groups: Vec<(f64, u32, u32)> = outcome
        .paths
        .iter()
        .filter(|p| p.flow > 0)
        .map(|p| {
            let w = requests
                .iter()
                .find(|r| r.id == p.path.request_id)
                .map_or(1.0, |r| r.weight);
            (w, p.flow, p.path.length().saturating_sub(1))
        })
        .collect();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let mut score = 0.0;
        for &(w, flow, swaps) in &groups {
            let mut ok = 0u32;
            for _ in 0..flow {
                if (0..swaps).all(|_| rng.random_bool(p_in)) {
                    ok += 1;
                }
            }
            score += w * f64::from(ok);
        }
        sum += score;
        sum_sq += score * score;
    }
    let n = trials as f64;
    let mean = sum / n;
    let stderr = if trials > 1 {
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate { mean, stderr, trials })
}
