use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::netmodel::EdgeKey;
use crate::pathfinder::{PathInfoEntry, PathKey};

use super::apportion::largest_remainder;
use super::shares::{deduction_weights, truncate_edge_paths, two_stage_weights};
use super::{Algorithm, RoutedPath, RoutingOutcome, SchedulerStats, SchedulingInput};

struct EdgeSlot {
    key: EdgeKey,
    capacity: u64,
    /// Indices into the path table, ordered by `(request, rank)`.
    members: Vec<usize>,
    /// Members sorted by descending allocation weight, for raises.
    raise_order: Vec<usize>,
    deduct_weights: Vec<f64>,
}

/// Global desired-capacity table refined edge by edge.
///
/// Every path starts at its bottleneck capacity. Visiting an oversubscribed
/// edge deducts the excess from the paths on it (longer paths give up more,
/// nobody drops below `f_min`); visiting an undersubscribed edge raises its
/// paths one pair at a time as long as every edge of the raised path still
/// has room, which hands capacity freed elsewhere to other paths. Edges are
/// swept in order of decreasing oversubscription until a full sweep changes
/// nothing.
///
/// Paths truncated away on any of their edges carry no flow.
pub fn propagatory_update(input: &SchedulingInput<'_>) -> RoutingOutcome {
    let params = input.params;
    let f_min = u64::from(input.f_min);

    let mut kept: BTreeMap<EdgeKey, Vec<PathInfoEntry>> = BTreeMap::new();
    let mut kept_pairs: BTreeSet<(EdgeKey, PathKey)> = BTreeSet::new();
    for (edge, entries) in input.info.iter() {
        let k = truncate_edge_paths(entries, params.l_max as usize);
        for e in &k {
            kept_pairs.insert((edge, e.path_key()));
        }
        kept.insert(edge, k);
    }

    let mut sorted: Vec<&crate::pathfinder::Path> = input.paths.iter().collect();
    sorted.sort_by_key(|p| p.key());
    let eligible: Vec<bool> = sorted
        .iter()
        .map(|p| {
            p.edges()
                .all(|e| kept_pairs.contains(&(e, p.key())) && input.net.is_active(e))
        })
        .collect();
    let position: BTreeMap<PathKey, usize> = sorted.iter().enumerate().map(|(i, p)| (p.key(), i)).collect();

    let mut slots: Vec<EdgeSlot> = Vec::new();
    let mut slot_of: BTreeMap<EdgeKey, usize> = BTreeMap::new();
    for (edge, entries) in kept {
        let entries: Vec<PathInfoEntry> = entries
            .into_iter()
            .filter(|e| eligible[position[&e.path_key()]])
            .collect();
        if entries.is_empty() {
            continue;
        }
        let members: Vec<usize> = entries.iter().map(|e| position[&e.path_key()]).collect();
        let alloc = two_stage_weights(&entries, params.alpha, params.beta);
        let mut raise: Vec<usize> = (0..members.len()).collect();
        raise.sort_by(|&a, &b| {
            alloc[b]
                .partial_cmp(&alloc[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        slot_of.insert(edge, slots.len());
        slots.push(EdgeSlot {
            key: edge,
            capacity: u64::from(input.net.capacity(edge)),
            raise_order: raise.into_iter().map(|i| members[i]).collect(),
            deduct_weights: deduction_weights(&entries, params.alpha, params.beta),
            members,
        });
    }

    let path_slots: Vec<Vec<usize>> = sorted
        .iter()
        .zip(&eligible)
        .map(|(p, &ok)| {
            if ok {
                p.edges().map(|e| slot_of[&e]).collect()
            } else {
                Vec::new()
            }
        })
        .collect();

    let mut desired: Vec<u64> = path_slots
        .iter()
        .map(|s| s.iter().map(|&i| slots[i].capacity).min().unwrap_or(0))
        .collect();
    let mut usage: Vec<u64> = slots
        .iter()
        .map(|s| s.members.iter().map(|&m| desired[m]).sum())
        .collect();

    let mut stats = SchedulerStats::default();
    let quiet_limit = slots.len() as u64;
    let mut quiet = 0u64;
    'sweep: while quiet < quiet_limit {
        let mut order: Vec<usize> = (0..slots.len()).collect();
        order.sort_by(|&a, &b| {
            // usage[a]/cap[a] vs usage[b]/cap[b], descending
            let lhs = u128::from(usage[b]) * u128::from(slots[a].capacity);
            let rhs = u128::from(usage[a]) * u128::from(slots[b].capacity);
            lhs.cmp(&rhs).then(slots[a].key.cmp(&slots[b].key))
        });
        for s in order {
            stats.edge_visits += 1;
            let changed = if usage[s] > slots[s].capacity {
                deduct(&slots, s, f_min, &path_slots, &mut desired, &mut usage, &mut stats);
                true
            } else if usage[s] < slots[s].capacity {
                raise(&slots, s, &path_slots, &mut desired, &mut usage, &mut stats)
            } else {
                false
            };
            if changed {
                quiet = 0;
                stats.counter_resets += 1;
            } else {
                quiet += 1;
                if quiet >= quiet_limit {
                    break 'sweep;
                }
            }
        }
    }

    let mut flows: BTreeMap<PathKey, u32> = BTreeMap::new();
    for (i, p) in sorted.iter().enumerate() {
        flows.insert(p.key(), desired[i] as u32);
    }
    RoutingOutcome {
        algorithm: Algorithm::PropagatoryUpdate,
        paths: input
            .paths
            .iter()
            .map(|p| RoutedPath {
                path: p.clone(),
                flow: flows[&p.key()],
            })
            .collect(),
        stats,
    }
}

fn apply(path: usize, delta: i64, path_slots: &[Vec<usize>], desired: &mut [u64], usage: &mut [u64]) {
    desired[path] = desired[path]
        .checked_add_signed(delta)
        .expect("desired stays non-negative");
    for &s in &path_slots[path] {
        usage[s] = usage[s].checked_add_signed(delta).expect("usage stays non-negative");
    }
}

fn deduct(
    slots: &[EdgeSlot],
    s: usize,
    f_min: u64,
    path_slots: &[Vec<usize>],
    desired: &mut [u64],
    usage: &mut [u64],
    stats: &mut SchedulerStats,
) {
    let slot = &slots[s];
    let mut excess = usage[s] - slot.capacity;
    let shares = largest_remainder(excess, &slot.deduct_weights);
    for (&m, share) in slot.members.iter().zip(shares) {
        let cut = share.min(desired[m].saturating_sub(f_min));
        if cut > 0 {
            apply(m, -(cut as i64), path_slots, desired, usage);
            excess -= cut;
        }
    }
    // shares clipped at f_min: take the rest from the largest desired values
    while excess > 0 {
        let m = slot
            .members
            .iter()
            .copied()
            .filter(|&m| desired[m] > f_min)
            .max_by(|&a, &b| desired[a].cmp(&desired[b]).then(b.cmp(&a)))
            .expect("f_min floor is jointly feasible on every kept edge");
        apply(m, -1, path_slots, desired, usage);
        stats.unit_steps += 1;
        excess -= 1;
    }
}

fn raise(
    slots: &[EdgeSlot],
    s: usize,
    path_slots: &[Vec<usize>],
    desired: &mut [u64],
    usage: &mut [u64],
    stats: &mut SchedulerStats,
) -> bool {
    let slot = &slots[s];
    let mut changed = false;
    loop {
        let mut progress = false;
        for &m in &slot.raise_order {
            if usage[s] >= slot.capacity {
                return changed;
            }
            stats.unit_steps += 1;
            if path_slots[m].iter().all(|&e| usage[e] < slots[e].capacity) {
                apply(m, 1, path_slots, desired, usage);
                progress = true;
                changed = true;
            }
        }
        if !progress {
            return changed;
        }
    }
}
