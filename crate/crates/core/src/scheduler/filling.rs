use std::collections::BTreeMap;

use crate::netmodel::{EdgeKey, Network};
use crate::pathfinder::Path;

use super::{Algorithm, RoutedPath, RoutingOutcome, SchedulerStats};

/// Integer water filling. All unfrozen paths sit at the same level at the
/// start of a round; each round visits them in `(request, rank)` order and
/// raises a path by one pair if every edge on it still has a free pair,
/// otherwise freezes it. A round where an edge runs short therefore hands
/// the leftover pairs to the first claimants and freezes the rest.
///
/// No truncation and no `f_min` floor apply here.
pub fn progressive_filling(net: &Network, paths: &[Path]) -> RoutingOutcome {
    let mut index: BTreeMap<EdgeKey, usize> = BTreeMap::new();
    let mut residual: Vec<u32> = Vec::new();
    let path_edges: Vec<Vec<usize>> = paths
        .iter()
        .map(|p| {
            p.edges()
                .map(|e| {
                    *index.entry(e).or_insert_with(|| {
                        residual.push(if net.is_active(e) { net.capacity(e) } else { 0 });
                        residual.len() - 1
                    })
                })
                .collect()
        })
        .collect();

    let mut order: Vec<usize> = (0..paths.len()).collect();
    order.sort_by_key(|&i| paths[i].key());
    let mut flows = vec![0u32; paths.len()];
    let mut active = order;
    let mut stats = SchedulerStats::default();

    while !active.is_empty() {
        let mut still = Vec::with_capacity(active.len());
        for &i in &active {
            stats.unit_steps += 1;
            if path_edges[i].iter().all(|&e| residual[e] > 0) {
                for &e in &path_edges[i] {
                    residual[e] -= 1;
                }
                flows[i] += 1;
                still.push(i);
            }
        }
        active = still;
    }

    RoutingOutcome {
        algorithm: Algorithm::ProgressiveFilling,
        paths: paths
            .iter()
            .zip(flows)
            .map(|(p, flow)| RoutedPath { path: p.clone(), flow })
            .collect(),
        stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{build_lattice, NodeId, TopologyKind};

    /// 2x4 grid, capacity 100 except where overridden.
    fn strip(caps: &[(u32, u32, u32)]) -> Network {
        let mut net = build_lattice(2, 4, TopologyKind::Square).unwrap();
        for e in net.edges_mut() {
            e.capacity = 100;
        }
        for &(a, b, c) in caps {
            let key = EdgeKey::new(NodeId(a), NodeId(b));
            let e = net.edges_mut().iter_mut().find(|e| e.key == key).unwrap();
            e.capacity = c;
        }
        net
    }

    fn path(r: u32, l: u32, nodes: &[u32]) -> Path {
        Path {
            request_id: r,
            rank: l,
            nodes: nodes.iter().copied().map(NodeId).collect(),
        }
    }

    #[test]
    fn single_path_reaches_bottleneck() {
        let net = strip(&[(1, 2, 7)]);
        let out = progressive_filling(&net, &[path(0, 0, &[0, 1, 2, 3])]);
        assert_eq!(out.paths[0].flow, 7);
    }

    #[test]
    fn three_paths_saturate_tight_edge_at_one() {
        let net = strip(&[(1, 2, 3)]);
        let ps = [
            path(0, 0, &[0, 1, 2]),
            path(1, 0, &[1, 2, 3]),
            path(1, 1, &[5, 1, 2, 6]),
        ];
        let out = progressive_filling(&net, &ps);
        assert!(out.paths.iter().all(|p| p.flow == 1));
    }

    #[test]
    fn odd_leftover_goes_to_first_claimant() {
        let net = strip(&[(1, 2, 5)]);
        let ps = [path(0, 0, &[0, 1, 2]), path(1, 0, &[1, 2, 3])];
        let out = progressive_filling(&net, &ps);
        assert_eq!(out.paths[0].flow, 3);
        assert_eq!(out.paths[1].flow, 2);
    }

    #[test]
    fn uneven_bottlenecks() {
        // path a limited to 2 by its own edge, b takes the rest of the shared edge
        let net = strip(&[(0, 1, 2), (1, 2, 10)]);
        let ps = [path(0, 0, &[0, 1, 2]), path(1, 0, &[1, 2, 3])];
        let out = progressive_filling(&net, &ps);
        assert_eq!((out.paths[0].flow, out.paths[1].flow), (2, 8));
    }
}
