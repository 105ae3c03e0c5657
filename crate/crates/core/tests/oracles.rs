mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use qroute::harness::stage_rng;
use qroute::netmodel::{
    build_lattice, deactivate_low_capacity_edges, generate_requests, sample_edge_states, EdgeKey, NodeId,
    RequestDefaults, ScenarioParams, TopologyKind,
};
use qroute::pathfinder::{build_path_info, find_paths, k_shortest_paths, Path};
use qroute::purification::purify_network;
use qroute::scheduler::{
    check_feasibility, compute_f_min, fully_kept_paths, largest_remainder, progressive_filling, schedule, Algorithm,
    RoutingParams, SchedulingInput,
};

use common::{all_simple_paths, lattice_with, maxmin_violation, min_l1};

#[test]
fn yen_matches_exhaustive_enumeration() {
    for (rows, cols) in [(3, 3), (3, 4)] {
        let net = lattice_with(rows, cols, TopologyKind::Square, |_| 50);
        let n = net.node_count() as u32;
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let all = all_simple_paths(&net, NodeId(s), NodeId(t));
                for k in 1..=8 {
                    let got = k_shortest_paths(&net, NodeId(s), NodeId(t), k);
                    let want: Vec<_> = all.iter().take(k).cloned().collect();
                    assert_eq!(got, want, "{rows}x{cols} {s}->{t} k={k}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn yen_matches_exhaustive_on_damaged_lattices(
        kind in prop_oneof![Just(TopologyKind::Square), Just(TopologyKind::Hexagonal), Just(TopologyKind::Triangular)],
        dead in proptest::collection::vec(any::<bool>(), 0..24),
        s in 0u32..9,
        t in 0u32..9,
        k in 1usize..10,
    ) {
        let mut i = 0;
        let net = lattice_with(3, 3, kind, |_| {
            let alive = !dead.get(i).copied().unwrap_or(false);
            i += 1;
            if alive { 20 } else { 0 }
        });
        let want: Vec<_> = all_simple_paths(&net, NodeId(s), NodeId(t)).into_iter().take(k).collect();
        prop_assert_eq!(k_shortest_paths(&net, NodeId(s), NodeId(t), k), want);
    }

    #[test]
    fn largest_remainder_minimizes_l1(
        total in 0u64..12,
        weights in proptest::collection::vec(0.05f64..5.0, 1..5),
    ) {
        let sum: f64 = weights.iter().sum();
        let quota: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
        let got = largest_remainder(total, &weights);
        prop_assert_eq!(got.iter().sum::<u64>(), total);
        let d: f64 = got.iter().zip(&quota).map(|(&a, q)| (a as f64 - q).abs()).sum();
        prop_assert!(d <= min_l1(total, &quota) + 1e-9);
    }

    #[test]
    fn progressive_filling_is_max_min_fair(
        picks in proptest::collection::vec((0usize..6, 0usize..6, 0usize..4), 1..=4),
        caps in proptest::collection::vec(1u32..=12, 7),
    ) {
        // 2x3 lattice with edge 1-4 removed: six usable edges
        let cut = EdgeKey::new(NodeId(1), NodeId(4));
        let mut i = 0;
        let net = lattice_with(2, 3, TopologyKind::Square, |k| {
            let c = caps[i];
            i += 1;
            if k == cut { 0 } else { c }
        });
        let mut paths = Vec::new();
        for (r, &(s, t, which)) in picks.iter().enumerate() {
            if s == t {
                continue;
            }
            let all = all_simple_paths(&net, NodeId(s as u32), NodeId(t as u32));
            paths.push(Path { request_id: r as u32, rank: 0, nodes: all[which % all.len()].clone() });
        }
        prop_assume!(!paths.is_empty());

        let out = progressive_filling(&net, &paths);
        prop_assert!(check_feasibility(&out, &net).is_ok());
        let index: BTreeMap<EdgeKey, usize> =
            net.edges().iter().filter(|e| e.active).enumerate().map(|(i, e)| (e.key, i)).collect();
        let cap_vec: Vec<u32> = net.edges().iter().filter(|e| e.active).map(|e| e.capacity).collect();
        let edge_sets: Vec<Vec<usize>> = paths.iter().map(|p| p.edges().map(|e| index[&e]).collect()).collect();
        let flows: Vec<u32> = out.paths.iter().map(|p| p.flow).collect();
        prop_assert_eq!(maxmin_violation(&edge_sets, &cap_vec, &flows), None, "flows {:?}", flows);
    }

    #[test]
    fn schedules_are_feasible_with_floor(
        seed in any::<u64>(),
        rows in 2u32..=6,
        cols in 2u32..=6,
        c0 in 10u32..=100,
        requests in 1usize..=4,
        k in 1usize..=10,
        l_max in 1u32..=12,
        alpha in 0.0f64..2.0,
        beta in 0.0f64..2.0,
    ) {
        let scenario = ScenarioParams { c0, ..ScenarioParams::default() };
        let raw = build_lattice(rows, cols, TopologyKind::Square).unwrap();
        let init = sample_edge_states(&raw, &scenario, &mut stage_rng(seed, 0)).unwrap();
        let net = deactivate_low_capacity_edges(&purify_network(&init, scenario.f_th).unwrap(), l_max).unwrap();
        let Ok(f_min) = compute_f_min(&net, l_max) else { return Ok(()) };
        let reqs = generate_requests(&net, requests, None, RequestDefaults::default(), &mut stage_rng(seed, 1)).unwrap();
        let paths = find_paths(&net, &reqs, k);
        let info = build_path_info(&paths);
        let params = RoutingParams { k, l_max, alpha, beta };
        let input = SchedulingInput { net: &net, paths: &paths, info: &info, params, f_min };
        let kept = fully_kept_paths(&info, &paths, l_max);
        for alg in Algorithm::ALL {
            let out = schedule(alg, &input);
            prop_assert!(check_feasibility(&out, &net).is_ok(), "{alg}");
            if alg != Algorithm::ProgressiveFilling {
                for key in &kept {
                    prop_assert!(out.flow(*key) >= f_min, "{alg} {key:?}");
                }
            }
        }
    }

    #[test]
    fn propagatory_update_leaves_no_free_unit(seed in any::<u64>(), requests in 1usize..=3, k in 1usize..=6) {
        let raw = build_lattice(5, 5, TopologyKind::Square).unwrap();
        let scenario = ScenarioParams::default();
        let init = sample_edge_states(&raw, &scenario, &mut stage_rng(seed, 0)).unwrap();
        let net = deactivate_low_capacity_edges(&purify_network(&init, scenario.f_th).unwrap(), 10).unwrap();
        let Ok(f_min) = compute_f_min(&net, 10) else { return Ok(()) };
        let reqs = generate_requests(&net, requests, None, RequestDefaults::default(), &mut stage_rng(seed, 1)).unwrap();
        let paths = find_paths(&net, &reqs, k);
        let info = build_path_info(&paths);
        let params = RoutingParams { k, ..RoutingParams::default() };
        let input = SchedulingInput { net: &net, paths: &paths, info: &info, params, f_min };
        let out = schedule(Algorithm::PropagatoryUpdate, &input);
        let usage = out.edge_usage();
        let kept = fully_kept_paths(&info, &paths, params.l_max);
        for key in kept {
            let p = paths.iter().find(|p| p.key() == key).unwrap();
            let room = p.edges().all(|e| usage.get(&e).copied().unwrap_or(0) < u64::from(net.capacity(e)));
            prop_assert!(!room, "path {key:?} could still grow");
        }
    }
}
