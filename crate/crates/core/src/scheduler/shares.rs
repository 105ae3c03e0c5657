//! Per-edge path list truncation and the two-stage request/path weights
//! shared by proportional share and propagatory update.

use std::collections::BTreeMap;

use crate::pathfinder::PathInfoEntry;

/// Keeps at most `l_max` entries, shortest paths first (ties by request then
/// rank). An entry that is the only one of its request on this edge is kept
/// ahead of every other entry; sole entries compete among themselves by the
/// same ordering only when there are more than `l_max` of them.
///
/// The result is ordered by `(request_id, path_rank)`.
pub fn truncate_edge_paths(entries: &[PathInfoEntry], l_max: usize) -> Vec<PathInfoEntry> {
    let mut per_request: BTreeMap<u32, usize> = BTreeMap::new();
    for e in entries {
        *per_request.entry(e.request_id).or_default() += 1;
    }
    let mut ranked: Vec<PathInfoEntry> = entries.to_vec();
    ranked.sort_by_key(|e| {
        let sole = per_request[&e.request_id] == 1;
        (!sole, e.path_length, e.request_id, e.path_rank)
    });
    ranked.truncate(l_max);
    ranked.sort_by_key(|e| (e.request_id, e.path_rank));
    ranked
}

/// Request share ∝ `n_r^beta` (entries of request r on the edge), then path
/// share within the request ∝ `d^-alpha`. Weights follow `entries` order and
/// sum to one.
pub fn two_stage_weights(entries: &[PathInfoEntry], alpha: f64, beta: f64) -> Vec<f64> {
    staged(entries, beta, |d| d.powf(-alpha))
}

/// Same request stage, but the path stage is ∝ `d^alpha`: the split used to
/// take capacity back, so longer paths give up more.
pub fn deduction_weights(entries: &[PathInfoEntry], alpha: f64, beta: f64) -> Vec<f64> {
    staged(entries, beta, |d| d.powf(alpha))
}

fn staged(entries: &[PathInfoEntry], beta: f64, path_factor: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    let mut path_sums: BTreeMap<u32, f64> = BTreeMap::new();
    for e in entries {
        *counts.entry(e.request_id).or_default() += 1;
        *path_sums.entry(e.request_id).or_default() += path_factor(f64::from(e.path_length));
    }
    let request_mass: BTreeMap<u32, f64> = counts.iter().map(|(&r, &n)| (r, (n as f64).powf(beta))).collect();
    let total: f64 = request_mass.values().sum();
    entries
        .iter()
        .map(|e| {
            let req = request_mass[&e.request_id] / total;
            req * path_factor(f64::from(e.path_length)) / path_sums[&e.request_id]
        })
        .collect()
}
