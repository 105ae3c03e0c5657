//! Throughput, traffic, delay and fairness measures of one routing outcome.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::netmodel::{EdgeKey, Network, Request};
use crate::scheduler::RoutingOutcome;

/// Conditions under which a measure fell back to zero instead of a value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricFlags {
    /// No edge carries flow; utilization statistics are zero.
    pub no_traffic: bool,
    /// Every request has zero flow; `gamma` is not defined.
    pub gamma_undefined: bool,
    /// `J_req` is 0/0.
    pub j_req_undefined: bool,
    /// `J_path` is 0/0.
    pub j_path_undefined: bool,
    /// `J_path` as printed exceeds one.
    pub j_path_above_one: bool,
}

impl MetricFlags {
    pub fn any(&self) -> bool {
        self.no_traffic
            || self.gamma_undefined
            || self.j_req_undefined
            || self.j_path_undefined
            || self.j_path_above_one
    }

    /// `|`-joined names of the raised flags, empty when none.
    pub fn labels(&self) -> String {
        let mut out = Vec::new();
        if self.no_traffic {
            out.push("no_traffic");
        }
        if self.gamma_undefined {
            out.push("gamma_undefined");
        }
        if self.j_req_undefined {
            out.push("j_req_undefined");
        }
        if self.j_path_undefined {
            out.push("j_path_undefined");
        }
        if self.j_path_above_one {
            out.push("j_path_above_one");
        }
        out.join("|")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeUtilization {
    pub edge: EdgeKey,
    pub used: u64,
    pub capacity: u32,
    pub utilization: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub throughput: f64,
    pub min_flow: f64,
    /// Weighted, swap-discounted flow of each request, by request id.
    pub request_throughput: BTreeMap<u32, f64>,
    pub utilization: Vec<EdgeUtilization>,
    pub u_ave: f64,
    pub u_var: f64,
    pub request_stretch: BTreeMap<u32, f64>,
    pub gamma: f64,
    pub j_req: f64,
    pub j_path: f64,
    /// `J_path` normalized by the number of paths instead of requests.
    pub j_path_normalized: f64,
    pub demand_satisfied: BTreeMap<u32, bool>,
    pub flags: MetricFlags,
}

fn weight_of(requests: &[Request], id: u32) -> f64 {
    requests.iter().find(|r| r.id == id).map_or(1.0, |r| r.weight)
}

/// `w_r * sum_l f^{r,l} * p_in^(d_{r,l} - 1)` for every request, including
/// requests without paths (term 0).
pub fn request_throughput(outcome: &RoutingOutcome, requests: &[Request], p_in: f64) -> BTreeMap<u32, f64> {
    let mut terms: BTreeMap<u32, f64> = requests.iter().map(|r| (r.id, 0.0)).collect();
    for p in &outcome.paths {
        let w = weight_of(requests, p.path.request_id);
        let swaps = p.path.length().saturating_sub(1) as i32;
        *terms.entry(p.path.request_id).or_default() += w * f64::from(p.flow) * p_in.powi(swaps);
    }
    terms
}

pub fn throughput(outcome: &RoutingOutcome, requests: &[Request], p_in: f64) -> f64 {
    request_throughput(outcome, requests, p_in).values().sum()
}

pub fn min_flow(outcome: &RoutingOutcome, requests: &[Request], p_in: f64) -> f64 {
    request_throughput(outcome, requests, p_in)
        .values()
        .copied()
        .reduce(f64::min)
        .unwrap_or(0.0)
}

/// `u_ij` over edges carrying flow, with their population mean and variance.
/// Returns `None` for the statistics when no edge carries flow.
pub fn utilization_stats(outcome: &RoutingOutcome, net: &Network) -> (Vec<EdgeUtilization>, Option<(f64, f64)>) {
    let per_edge: Vec<EdgeUtilization> = outcome
        .edge_usage()
        .into_iter()
        .map(|(edge, used)| {
            let capacity = net.capacity(edge);
            EdgeUtilization {
                edge,
                used,
                capacity,
                utilization: used as f64 / f64::from(capacity),
            }
        })
        .collect();
    if per_edge.is_empty() {
        return (per_edge, None);
    }
    let n = per_edge.len() as f64;
    let mean = per_edge.iter().map(|u| u.utilization).sum::<f64>() / n;
    let var = per_edge.iter().map(|u| (u.utilization - mean).powi(2)).sum::<f64>() / n;
    (per_edge, Some((mean, var)))
}

/// Flow-weighted path length over the rank-0 length, per request with
/// positive flow, and their unweighted mean.
pub fn stretch_factor(outcome: &RoutingOutcome) -> (BTreeMap<u32, f64>, Option<f64>) {
    let mut shortest: BTreeMap<u32, u32> = BTreeMap::new();
    let mut weighted: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for p in &outcome.paths {
        let r = p.path.request_id;
        if p.path.rank == 0 {
            shortest.insert(r, p.path.length());
        }
        let acc = weighted.entry(r).or_default();
        acc.0 += u64::from(p.flow) * u64::from(p.path.length());
        acc.1 += u64::from(p.flow);
    }
    let per_request: BTreeMap<u32, f64> = weighted
        .into_iter()
        .filter(|(_, (_, f))| *f > 0)
        .map(|(r, (fd, f))| {
            let d0 = shortest.get(&r).copied().unwrap_or(1).max(1);
            (r, fd as f64 / (f64::from(d0) * f as f64))
        })
        .collect();
    if per_request.is_empty() {
        return (per_request, None);
    }
    let gamma = per_request.values().sum::<f64>() / per_request.len() as f64;
    (per_request, Some(gamma))
}

/// Jain's index over weighted request flows. `None` when all flows are zero.
pub fn jain_requests(outcome: &RoutingOutcome, requests: &[Request]) -> Option<f64> {
    let flows = outcome.request_flows();
    let xs: Vec<f64> = requests
        .iter()
        .map(|r| r.weight * flows.get(&r.id).copied().unwrap_or(0) as f64)
        .collect();
    let sum: f64 = xs.iter().sum();
    let sq: f64 = xs.iter().map(|x| x * x).sum();
    (sq > 0.0).then(|| sum * sum / (xs.len() as f64 * sq))
}

/// The path fairness index with the request count `|R|` in the denominator,
/// as the measure is defined; it can exceed one. The second value replaces
/// `|R|` by the number of paths and stays in `(0, 1]`.
pub fn jain_paths(outcome: &RoutingOutcome, requests: &[Request]) -> Option<(f64, f64)> {
    let mut num = 0.0;
    let mut den = 0.0;
    for p in &outcome.paths {
        let w = weight_of(requests, p.path.request_id);
        let f = f64::from(p.flow);
        num += w * f;
        den += w * w * f * f;
    }
    if den <= 0.0 {
        return None;
    }
    let printed = num * num / (requests.len().max(1) as f64 * den);
    let normalized = num * num / (outcome.paths.len() as f64 * den);
    Some((printed, normalized))
}

pub fn evaluate_demand(outcome: &RoutingOutcome, requests: &[Request]) -> BTreeMap<u32, bool> {
    let flows = outcome.request_flows();
    requests
        .iter()
        .map(|r| (r.id, flows.get(&r.id).copied().unwrap_or(0) >= u64::from(r.demand)))
        .collect()
}

pub fn evaluate(outcome: &RoutingOutcome, net: &Network, requests: &[Request], p_in: f64) -> MetricsReport {
    let mut flags = MetricFlags::default();
    let request_throughput = request_throughput(outcome, requests, p_in);
    let throughput = request_throughput.values().sum();
    let min_flow = request_throughput.values().copied().reduce(f64::min).unwrap_or(0.0);

    let (utilization, stats) = utilization_stats(outcome, net);
    let (u_ave, u_var) = stats.unwrap_or_else(|| {
        flags.no_traffic = true;
        (0.0, 0.0)
    });
    let (request_stretch, gamma) = stretch_factor(outcome);
    let gamma = gamma.unwrap_or_else(|| {
        flags.gamma_undefined = true;
        0.0
    });
    let j_req = jain_requests(outcome, requests).unwrap_or_else(|| {
        flags.j_req_undefined = true;
        0.0
    });
    let (j_path, j_path_normalized) = jain_paths(outcome, requests).unwrap_or_else(|| {
        flags.j_path_undefined = true;
        (0.0, 0.0)
    });
    flags.j_path_above_one = j_path > 1.0 + 1e-12;

    MetricsReport {
        throughput,
        min_flow,
        request_throughput,
        utilization,
        u_ave,
        u_var,
        request_stretch,
        gamma,
        j_req,
        j_path,
        j_path_normalized,
        demand_satisfied: evaluate_demand(outcome, requests),
        flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{build_lattice, NodeId, TopologyKind};
    use crate::pathfinder::Path;
    use crate::scheduler::{Algorithm, RoutedPath, SchedulerStats};

    fn req(id: u32, weight: f64, demand: u32) -> Request {
        Request {
            id,
            source: NodeId(0),
            terminal: NodeId(1),
            demand,
            weight,
        }
    }

    /// Path of `d` hops along the bottom row of a wide grid.
    fn routed(r: u32, l: u32, d: u32, flow: u32) -> RoutedPath {
        RoutedPath {
            path: Path {
                request_id: r,
                rank: l,
                nodes: (0..=d).map(NodeId).collect(),
            },
            flow,
        }
    }

    fn outcome(paths: Vec<RoutedPath>) -> RoutingOutcome {
        RoutingOutcome {
            algorithm: Algorithm::ProgressiveFilling,
            paths,
            stats: SchedulerStats::default(),
        }
    }

    #[test]
    fn throughput_examples() {
        let o = outcome(vec![routed(0, 0, 3, 4)]);
        assert!((throughput(&o, &[req(0, 1.0, 1)], 0.9) - 3.24).abs() < 1e-12);
        let o = outcome(vec![routed(0, 0, 3, 4), routed(0, 1, 5, 2), routed(1, 0, 2, 3)]);
        let reqs = [req(0, 2.0, 1), req(1, 0.5, 1)];
        assert!((throughput(&o, &reqs, 1.0) - (2.0 * 6.0 + 0.5 * 3.0)).abs() < 1e-12);
        let zero = outcome(vec![routed(0, 0, 3, 0)]);
        assert_eq!(throughput(&zero, &[req(0, 1.0, 1)], 0.9), 0.0);
    }

    #[test]
    fn min_flow_examples() {
        // terms 3.24 and 1.8
        let o = outcome(vec![routed(0, 0, 3, 4), routed(1, 0, 2, 2)]);
        let reqs = [req(0, 1.0, 1), req(1, 1.0, 1)];
        assert!((min_flow(&o, &reqs, 0.9) - 1.8).abs() < 1e-12);
        let single = outcome(vec![routed(0, 0, 3, 4)]);
        let r = [req(0, 1.0, 1)];
        assert_eq!(min_flow(&single, &r, 0.9), throughput(&single, &r, 0.9));
    }

    #[test]
    fn utilization_examples() {
        let mut net = build_lattice(2, 12, TopologyKind::Square).unwrap();
        for e in net.edges_mut() {
            e.capacity = 10;
        }
        let o = outcome(vec![routed(0, 0, 1, 3), routed(1, 0, 1, 4)]);
        let (u, stats) = utilization_stats(&o, &net);
        assert_eq!(u.len(), 1);
        assert!((u[0].utilization - 0.7).abs() < 1e-12);
        assert!((stats.unwrap().0 - 0.7).abs() < 1e-12);

        let full = outcome(vec![routed(0, 0, 3, 10), routed(1, 0, 0, 0)]);
        let (u, stats) = utilization_stats(&full, &net);
        assert_eq!(u.len(), 3);
        assert_eq!(stats, Some((1.0, 0.0)));

        let idle = outcome(vec![routed(0, 0, 3, 0)]);
        let report = evaluate(&idle, &net, &[req(0, 1.0, 1)], 0.9);
        assert!(report.flags.no_traffic && report.u_ave == 0.0);
    }

    #[test]
    fn stretch_examples() {
        let o = outcome(vec![routed(0, 0, 4, 2), routed(0, 1, 6, 2)]);
        let (per, gamma) = stretch_factor(&o);
        assert!((per[&0] - 1.25).abs() < 1e-12);
        assert_eq!(gamma, Some(1.25));
        let shortest_only = outcome(vec![routed(0, 0, 4, 7), routed(0, 1, 6, 0)]);
        assert_eq!(stretch_factor(&shortest_only).1, Some(1.0));
        let none = outcome(vec![routed(0, 0, 4, 0)]);
        assert_eq!(stretch_factor(&none).1, None);
    }

    #[test]
    fn jain_request_examples() {
        let reqs = [req(0, 1.0, 1), req(1, 1.0, 1)];
        let eq = outcome(vec![routed(0, 0, 2, 5), routed(1, 0, 2, 5)]);
        assert!((jain_requests(&eq, &reqs).unwrap() - 1.0).abs() < 1e-12);
        let skew = outcome(vec![routed(0, 0, 2, 4), routed(1, 0, 2, 0)]);
        assert!((jain_requests(&skew, &reqs).unwrap() - 0.5).abs() < 1e-12);
        let mild = outcome(vec![routed(0, 0, 2, 3), routed(1, 0, 2, 1)]);
        assert!((jain_requests(&mild, &reqs).unwrap() - 0.8).abs() < 1e-12);
        let zero = outcome(vec![routed(0, 0, 2, 0)]);
        assert_eq!(jain_requests(&zero, &reqs), None);
    }

    #[test]
    fn jain_path_examples() {
        let r = [req(0, 1.0, 1)];
        let one = outcome(vec![routed(0, 0, 2, 7)]);
        assert_eq!(jain_paths(&one, &r).unwrap().0, 1.0);
        let spread = outcome(vec![routed(0, 0, 2, 2), routed(0, 1, 3, 2)]);
        let (printed, normalized) = jain_paths(&spread, &r).unwrap();
        assert_eq!(printed, 2.0);
        assert_eq!(normalized, 1.0);
        assert!(evaluate(&spread, &wide(), &r, 1.0).flags.j_path_above_one);
        let lumped = outcome(vec![routed(0, 0, 2, 4), routed(0, 1, 3, 0)]);
        assert!(jain_paths(&lumped, &r).unwrap().0 < printed);
    }

    fn wide() -> Network {
        let mut net = build_lattice(2, 12, TopologyKind::Square).unwrap();
        for e in net.edges_mut() {
            e.capacity = 10;
        }
        net
    }

    #[test]
    fn demand_examples() {
        let o = outcome(vec![routed(0, 0, 2, 10), routed(1, 0, 2, 0), routed(2, 0, 2, 8)]);
        let reqs = [req(0, 1.0, 8), req(1, 1.0, 8), req(2, 1.0, 8)];
        let sat = evaluate_demand(&o, &reqs);
        assert_eq!(sat.values().copied().collect::<Vec<_>>(), vec![true, false, true]);
    }
}
