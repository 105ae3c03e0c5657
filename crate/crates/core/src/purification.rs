//! Edge purification: trades pairs for fidelity until the threshold is met.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{Network, Phase};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationOutcome {
    pub final_fidelity: f64,
    pub final_capacity: u32,
    pub rounds: u32,
}

/// One round of two-to-one pairwise purification on the fidelity.
pub fn pairwise_map(f: f64) -> f64 {
    let good = f * f;
    let bad = (1.0 - f) * (1.0 - f);
    good / (good + bad)
}

pub fn purify_edge(fidelity: f64, capacity: u32, f_th: f64) -> PurificationOutcome {
    purify_edge_with(pairwise_map, fidelity, capacity, f_th)
}

/// Halves the capacity per application of `map` while below `f_th` and at
/// least two pairs remain. An edge that never reaches `f_th` ends with zero
/// capacity.
pub fn purify_edge_with(map: impl Fn(f64) -> f64, fidelity: f64, capacity: u32, f_th: f64) -> PurificationOutcome {
    let mut f = fidelity;
    let mut c = capacity;
    let mut rounds = 0;
    while f < f_th && c >= 2 {
        c /= 2;
        f = map(f);
        rounds += 1;
    }
    if f < f_th {
        c = 0;
    }
    PurificationOutcome {
        final_fidelity: f,
        final_capacity: c,
        rounds,
    }
}

pub fn purify_network(net: &Network, f_th: f64) -> Result<Network> {
    if net.phase() != Phase::Initialized {
        return Err(Error::PhaseMismatch {
            expected: Phase::Initialized,
            actual: net.phase(),
        });
    }
    let mut out = net.clone();
    for edge in out.edges_mut().iter_mut().filter(|e| e.active) {
        let o = purify_edge(edge.fidelity, edge.capacity, f_th);
        edge.fidelity = o.final_fidelity;
        edge.capacity = o.final_capacity;
        if edge.capacity == 0 {
            edge.active = false;
        } else {
            debug_assert!(edge.fidelity >= f_th);
        }
    }
    out.set_phase(Phase::Purified);
    Ok(out)
}
