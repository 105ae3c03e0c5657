//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use qroute::netmodel::{assign_edge_states, build_lattice, EdgeKey, Network, NodeId, TopologyKind};
use qroute::purification::purify_network;

/// Purified lattice with the given capacities and perfect fidelity.
pub fn lattice_with(rows: u32, cols: u32, kind: TopologyKind, mut cap: impl FnMut(EdgeKey) -> u32) -> Network {
    let raw = build_lattice(rows, cols, kind).unwrap();
    let init = assign_edge_states(&raw, |k| (cap(k), 1.0)).unwrap();
    purify_network(&init, 0.8).unwrap()
}

/// Every loopless s-t path by depth-first search, sorted by hop count and
/// then by node sequence.
pub fn all_simple_paths(net: &Network, s: NodeId, t: NodeId) -> Vec<Vec<NodeId>> {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in net.edges().iter().filter(|e| e.active) {
        adj.entry(e.key.0).or_default().push(e.key.1);
        adj.entry(e.key.1).or_default().push(e.key.0);
    }
    let mut out = Vec::new();
    let mut stack = vec![s];
    fn dfs(adj: &BTreeMap<NodeId, Vec<NodeId>>, t: NodeId, stack: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let cur = *stack.last().unwrap();
        if cur == t {
            out.push(stack.clone());
            return;
        }
        for &n in adj.get(&cur).map(Vec::as_slice).unwrap_or(&[]) {
            if !stack.contains(&n) {
                stack.push(n);
                dfs(adj, t, stack, out);
                stack.pop();
            }
        }
    }
    if s != t {
        dfs(&adj, t, &mut stack, &mut out);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Integer max-min check. Path `p` witnesses a violation when raising it by
/// one stays feasible after zeroing every path whose flow exceeds `f_p + 1`
/// (a move to or from a path at `f_p + 1` only swaps two values).
pub fn maxmin_violation(paths: &[Vec<usize>], caps: &[u32], flows: &[u32]) -> Option<usize> {
    (0..paths.len()).find(|&p| {
        let mut load = vec![0u64; caps.len()];
        for (q, edges) in paths.iter().enumerate() {
            let f = if q == p {
                flows[p] + 1
            } else if flows[q] <= flows[p] + 1 {
                flows[q]
            } else {
                0
            };
            for &e in edges {
                load[e] += u64::from(f);
            }
        }
        load.iter().zip(caps).all(|(&l, &c)| l <= u64::from(c))
    })
}

/// Smallest L1 distance from `quota` over non-negative integer vectors
/// summing to `total`, by enumeration.
pub fn min_l1(total: u64, quota: &[f64]) -> f64 {
    fn rec(i: usize, left: u64, quota: &[f64], acc: f64, best: &mut f64) {
        if i + 1 == quota.len() {
            let d = acc + (left as f64 - quota[i]).abs();
            if d < *best {
                *best = d;
            }
            return;
        }
        for a in 0..=left {
            rec(i + 1, left - a, quota, acc + (a as f64 - quota[i]).abs(), best);
        }
    }
    let mut best = f64::INFINITY;
    rec(0, total, quota, 0.0, &mut best);
    best
}

/// Least-squares fit of `y = a + b x`; returns `(b, r_squared)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let b = sxy / sxx;
    (b, sxy * sxy / (sxx * syy))
}
