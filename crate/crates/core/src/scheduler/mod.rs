//! Capacity allocation (proportional share, progressive filling,
//! propagatory update) and short-board flow determination.

mod apportion;
mod filling;
mod propagatory;
mod proportional;
mod shares;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::netmodel::{EdgeKey, Network};
use crate::pathfinder::{Path, PathInfoSet, PathKey};

pub use apportion::largest_remainder;
pub use filling::progressive_filling;
pub use propagatory::propagatory_update;
pub use proportional::{proportional_share, share_edge};
pub use shares::{deduction_weights, truncate_edge_paths, two_stage_weights};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "PS")]
    ProportionalShare,
    #[serde(rename = "PF")]
    ProgressiveFilling,
    #[serde(rename = "PU")]
    PropagatoryUpdate,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::ProportionalShare,
        Algorithm::ProgressiveFilling,
        Algorithm::PropagatoryUpdate,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::ProportionalShare => "PS",
            Algorithm::ProgressiveFilling => "PF",
            Algorithm::PropagatoryUpdate => "PU",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PS" => Ok(Algorithm::ProportionalShare),
            "PF" => Ok(Algorithm::ProgressiveFilling),
            "PU" => Ok(Algorithm::PropagatoryUpdate),
            _ => Err(invalid("algorithm", format!("unknown algorithm `{s}`"))),
        }
    }
}

/// Free routing parameters `{l_max, k, alpha, beta}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingParams {
    pub k: usize,
    pub l_max: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for RoutingParams {
    fn default() -> Self {
        RoutingParams {
            k: 10,
            l_max: 10,
            alpha: 1.0,
            beta: 1.0,
        }
    }
}

impl RoutingParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k", "must be a positive integer"));
        }
        if self.l_max == 0 {
            return Err(invalid("l_max", "must be a positive integer"));
        }
        if !self.alpha.is_finite() {
            return Err(invalid("alpha", "must be finite"));
        }
        if !self.beta.is_finite() {
            return Err(invalid("beta", "must be finite"));
        }
        Ok(())
    }
}

/// `floor(min C_ij / l_max)` over active edges.
pub fn compute_f_min(net: &Network, l_max: u32) -> Result<u32> {
    if l_max == 0 {
        return Err(invalid("l_max", "must be a positive integer"));
    }
    let min = net
        .active_edges()
        .map(|e| e.capacity)
        .min()
        .ok_or(Error::NoActiveEdge)?;
    Ok((min / l_max).max(1))
}

/// Per-edge, per-path allocated capacity produced by proportional share.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTable {
    pub allocations: BTreeMap<EdgeKey, BTreeMap<PathKey, u32>>,
}

impl ScheduleTable {
    pub fn get(&self, edge: EdgeKey, path: PathKey) -> u32 {
        self.allocations
            .get(&edge)
            .and_then(|m| m.get(&path))
            .copied()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutedPath {
    pub path: Path,
    pub flow: u32,
}

/// Work counters, used to compare algorithm cost without wall clocks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulerStats {
    pub edge_visits: u64,
    pub counter_resets: u64,
    pub unit_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingOutcome {
    pub algorithm: Algorithm,
    pub paths: Vec<RoutedPath>,
    pub stats: SchedulerStats,
}

impl RoutingOutcome {
    pub fn flow(&self, key: PathKey) -> u32 {
        self.paths.iter().find(|p| p.path.key() == key).map_or(0, |p| p.flow)
    }

    /// Aggregated flow `f^r` per request id, in id order.
    pub fn request_flows(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for p in &self.paths {
            *out.entry(p.path.request_id).or_default() += u64::from(p.flow);
        }
        out
    }

    /// Routed pairs per edge, only edges with positive usage.
    pub fn edge_usage(&self) -> BTreeMap<EdgeKey, u64> {
        let mut out = BTreeMap::new();
        for p in self.paths.iter().filter(|p| p.flow > 0) {
            for e in p.path.edges() {
                *out.entry(e).or_default() += u64::from(p.flow);
            }
        }
        out
    }

    pub fn total_flow(&self) -> u64 {
        self.paths.iter().map(|p| u64::from(p.flow)).sum()
    }
}

/// Short-board constraint: each path carries the smallest allocation it
/// received over its edges.
pub fn flow_determination(table: &ScheduleTable, paths: &[Path]) -> RoutingOutcome {
    let routed = paths
        .iter()
        .map(|p| RoutedPath {
            flow: p.edges().map(|e| table.get(e, p.key())).min().unwrap_or(0),
            path: p.clone(),
        })
        .collect();
    RoutingOutcome {
        algorithm: Algorithm::ProportionalShare,
        paths: routed,
        stats: SchedulerStats::default(),
    }
}

/// Everything a scheduler needs for one processing window.
#[derive(Clone, Copy, Debug)]
pub struct SchedulingInput<'a> {
    pub net: &'a Network,
    pub paths: &'a [Path],
    pub info: &'a PathInfoSet,
    pub params: RoutingParams,
    pub f_min: u32,
}

pub fn schedule(algorithm: Algorithm, input: &SchedulingInput<'_>) -> RoutingOutcome {
    match algorithm {
        Algorithm::ProportionalShare => {
            let table = proportional_share(input.net, input.info, &input.params, input.f_min);
            flow_determination(&table, input.paths)
        }
        Algorithm::ProgressiveFilling => progressive_filling(input.net, input.paths),
        Algorithm::PropagatoryUpdate => propagatory_update(input),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityViolation {
    pub edge: EdgeKey,
    pub used: u64,
    pub capacity: u32,
}

/// Checks that no edge carries more pairs than it holds, and that no flow
/// rides an inactive edge.
pub fn check_feasibility(outcome: &RoutingOutcome, net: &Network) -> Result<(), CapacityViolation> {
    for (edge, used) in outcome.edge_usage() {
        let capacity = if net.is_active(edge) { net.capacity(edge) } else { 0 };
        if used > u64::from(capacity) {
            return Err(CapacityViolation { edge, used, capacity });
        }
    }
    Ok(())
}

/// Paths that survived truncation on every edge they traverse.
pub fn fully_kept_paths(info: &PathInfoSet, paths: &[Path], l_max: u32) -> Vec<PathKey> {
    let kept: std::collections::BTreeSet<(EdgeKey, PathKey)> = info
        .iter()
        .flat_map(|(edge, entries)| {
            truncate_edge_paths(entries, l_max as usize)
                .into_iter()
                .map(move |e| (edge, e.path_key()))
        })
        .collect();
    paths
        .iter()
        .filter(|p| p.edges().all(|e| kept.contains(&(e, p.key()))))
        .map(Path::key)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{build_lattice, NodeId, TopologyKind};

    fn net_with_caps(caps: &[u32]) -> Network {
        let mut net = build_lattice(2, 2, TopologyKind::Square).unwrap();
        for (e, &c) in net.edges_mut().iter_mut().zip(caps) {
            e.capacity = c;
            e.active = c > 0;
        }
        net
    }

    #[test]
    fn f_min_examples() {
        assert_eq!(compute_f_min(&net_with_caps(&[100, 120, 150, 200]), 15).unwrap(), 6);
        assert_eq!(compute_f_min(&net_with_caps(&[15, 120, 150, 200]), 15).unwrap(), 1);
        assert_eq!(compute_f_min(&net_with_caps(&[10, 10, 10, 10]), 10).unwrap(), 1);
        assert_eq!(
            compute_f_min(&net_with_caps(&[0, 0, 0, 0]), 10),
            Err(Error::NoActiveEdge)
        );
    }

    fn path(nodes: &[u32]) -> Path {
        Path {
            request_id: 0,
            rank: 0,
            nodes: nodes.iter().copied().map(NodeId).collect(),
        }
    }

    #[test]
    fn short_board() {
        let p = path(&[0, 1, 3, 2]);
        let mut table = ScheduleTable::default();
        for (e, c) in p.edges().zip([4, 6, 3]) {
            table.allocations.entry(e).or_default().insert(p.key(), c);
        }
        assert_eq!(flow_determination(&table, std::slice::from_ref(&p)).paths[0].flow, 3);

        let single = path(&[0, 1]);
        let mut table = ScheduleTable::default();
        table
            .allocations
            .entry(single.edges().next().unwrap())
            .or_default()
            .insert(single.key(), 9);
        assert_eq!(flow_determination(&table, &[single]).paths[0].flow, 9);
    }

    #[test]
    fn algorithm_tags_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.tag().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{}\"", a.tag()));
        }
        assert!("XX".parse::<Algorithm>().is_err());
    }
}
