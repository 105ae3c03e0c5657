use crate::netmodel::Network;
use crate::pathfinder::{PathInfoEntry, PathInfoSet, PathKey};

use super::apportion::largest_remainder;
use super::shares::{truncate_edge_paths, two_stage_weights};
use super::{RoutingParams, ScheduleTable};

/// Edge-local split of each edge's capacity among its kept paths. Uses
/// nothing but the entries recorded on that edge.
pub fn proportional_share(net: &Network, info: &PathInfoSet, params: &RoutingParams, f_min: u32) -> ScheduleTable {
    let mut table = ScheduleTable::default();
    for (edge, entries) in info.iter() {
        let capacity = net.capacity(edge);
        let alloc = share_edge(capacity, entries, params, f_min);
        if !alloc.is_empty() {
            table.allocations.insert(edge, alloc.into_iter().collect());
        }
    }
    table
}

/// Every kept entry gets `f_min`; the rest of `capacity` is apportioned by
/// the two-stage weights.
pub fn share_edge(capacity: u32, entries: &[PathInfoEntry], params: &RoutingParams, f_min: u32) -> Vec<(PathKey, u32)> {
    let kept = truncate_edge_paths(entries, params.l_max as usize);
    if kept.is_empty() {
        return Vec::new();
    }
    let floor_total = u64::from(f_min) * kept.len() as u64;
    let (floor, remainder) = if floor_total <= u64::from(capacity) {
        (f_min, u64::from(capacity) - floor_total)
    } else {
        // only reachable when the edge was not pruned at l_max
        (0, u64::from(capacity))
    };
    let weights = two_stage_weights(&kept, params.alpha, params.beta);
    let extra = largest_remainder(remainder, &weights);
    kept.iter()
        .zip(extra)
        .map(|(e, x)| (e.path_key(), floor + x as u32))
        .collect()
}
