//! Lattice topologies, stochastic edge initialization, topology revision,
//! failure injection and request generation.
//!
//! Nodes are numbered row-major: the node at column `x`, row `y` has id
//! `y * cols + x`. The two-digit "xy" rendering returned by
//! [`Network::label`] is for display only.

use std::fmt;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Undirected edge identifier, smaller endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey(pub NodeId, pub NodeId);

impl EdgeKey {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            EdgeKey(a, b)
        } else {
            EdgeKey(b, a)
        }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.0 == node || self.1 == node
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    /// Degree-4 grid.
    Square,
    /// Brick-wall lattice: every horizontal edge, vertical edges where `x + y` is even.
    Hexagonal,
    /// Square grid plus one diagonal per cell, `(x, y)`–`(x+1, y+1)`.
    Triangular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Raw,
    Initialized,
    Purified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeState {
    pub key: EdgeKey,
    /// Usable entangled pairs on the edge.
    pub capacity: u32,
    pub fidelity: f64,
    pub active: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    rows: u32,
    cols: u32,
    kind: TopologyKind,
    phase: Phase,
    edges: Vec<EdgeState>,
}

/// Quantum parameters shared by every element of the network.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Maximal pairs per edge before losses.
    pub c0: u32,
    pub f_mean: f64,
    pub f_std: f64,
    pub f_th: f64,
    /// Swap success probability inside a station.
    pub p_in: f64,
    /// Pair generation success probability over a link.
    pub p_out: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            c0: 100,
            f_mean: 0.8,
            f_std: 0.1,
            f_th: 0.8,
            p_in: 0.9,
            p_out: 0.8,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        if self.c0 < 1 {
            return Err(invalid("c0", "must be at least 1"));
        }
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(name, format!("{p} is not a probability")));
            }
        }
        if !(self.f_th > 0.0 && self.f_th <= 1.0) {
            return Err(invalid("f_th", format!("{} is outside (0, 1]", self.f_th)));
        }
        if !self.f_mean.is_finite() {
            return Err(invalid("f_mean", "must be finite"));
        }
        if !(self.f_std.is_finite() && self.f_std >= 0.0) {
            return Err(invalid("f_std", "must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: u32,
    pub source: NodeId,
    pub terminal: NodeId,
    /// Requested number of end-to-end pairs.
    pub demand: u32,
    pub weight: f64,
}

pub fn build_lattice(rows: u32, cols: u32, kind: TopologyKind) -> Result<Network> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidDimension { rows, cols });
    }
    let id = |x: u32, y: u32| NodeId(y * cols + x);
    let mut keys = Vec::new();
    for y in 0..rows {
        for x in 0..cols {
            if x + 1 < cols {
                keys.push(EdgeKey::new(id(x, y), id(x + 1, y)));
            }
            let vertical = match kind {
                TopologyKind::Hexagonal => (x + y) % 2 == 0,
                _ => true,
            };
            if vertical && y + 1 < rows {
                keys.push(EdgeKey::new(id(x, y), id(x, y + 1)));
            }
            if kind == TopologyKind::Triangular && x + 1 < cols && y + 1 < rows {
                keys.push(EdgeKey::new(id(x, y), id(x + 1, y + 1)));
            }
        }
    }
    keys.sort();
    let edges = keys
        .into_iter()
        .map(|key| EdgeState {
            key,
            capacity: 0,
            fidelity: 0.0,
            active: true,
        })
        .collect();
    Ok(Network {
        rows,
        cols,
        kind,
        phase: Phase::Raw,
        edges,
    })
}

impl Network {
    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub(crate) fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn node_count(&self) -> usize {
        (self.rows * self.cols) as usize
    }

    pub fn node(&self, x: u32, y: u32) -> NodeId {
        NodeId(y * self.cols + x)
    }

    /// `(column, row)` of a node.
    pub fn coords(&self, node: NodeId) -> (u32, u32) {
        (node.0 % self.cols, node.0 / self.cols)
    }

    /// Display label: column digits followed by row digits.
    pub fn label(&self, node: NodeId) -> String {
        let (x, y) = self.coords(node);
        format!("{x}{y}")
    }

    pub fn edges(&self) -> &[EdgeState] {
        &self.edges
    }

    pub(crate) fn edges_mut(&mut self) -> &mut [EdgeState] {
        &mut self.edges
    }

    pub fn edge(&self, key: EdgeKey) -> Option<&EdgeState> {
        self.edges
            .binary_search_by_key(&key, |e| e.key)
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn active_edges(&self) -> impl Iterator<Item = &EdgeState> {
        self.edges.iter().filter(|e| e.active)
    }

    pub fn active_edge_count(&self) -> usize {
        self.active_edges().count()
    }

    pub fn capacity(&self, key: EdgeKey) -> u32 {
        self.edge(key).map_or(0, |e| e.capacity)
    }

    pub fn is_active(&self, key: EdgeKey) -> bool {
        self.edge(key).is_some_and(|e| e.active)
    }

    /// Sorted adjacency over active edges.
    pub fn active_adjacency(&self) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for e in self.active_edges() {
            adj[e.key.0.index()].push(e.key.1);
            adj[e.key.1.index()].push(e.key.0);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    fn deactivate(&mut self, key: EdgeKey) {
        if let Ok(i) = self.edges.binary_search_by_key(&key, |e| e.key) {
            self.edges[i].active = false;
        }
    }
}

/// Draws capacities from `Binomial(c0, p_out)` and fidelities from
/// `Normal(f_mean, f_std)` clipped to `[0, 1]`, one edge at a time in key order.
pub fn sample_edge_states<R: Rng + ?Sized>(net: &Network, params: &ScenarioParams, rng: &mut R) -> Result<Network> {
    if net.phase != Phase::Raw {
        return Err(Error::PhaseMismatch {
            expected: Phase::Raw,
            actual: net.phase,
        });
    }
    params.validate()?;
    let capacity = Binomial::new(u64::from(params.c0), params.p_out).map_err(|e| invalid("p_out", e.to_string()))?;
    let fidelity = Normal::new(params.f_mean, params.f_std).map_err(|e| invalid("f_std", e.to_string()))?;

    let mut out = net.clone();
    for edge in &mut out.edges {
        edge.capacity = capacity.sample(rng) as u32;
        edge.fidelity = fidelity.sample(rng).clamp(0.0, 1.0);
        edge.active = edge.capacity > 0;
    }
    out.phase = Phase::Initialized;
    Ok(out)
}

/// Initializes a raw lattice from explicit `(capacity, fidelity)` values,
/// called once per edge in key order.
pub fn assign_edge_states(net: &Network, mut state: impl FnMut(EdgeKey) -> (u32, f64)) -> Result<Network> {
    if net.phase != Phase::Raw {
        return Err(Error::PhaseMismatch {
            expected: Phase::Raw,
            actual: net.phase,
        });
    }
    let mut out = net.clone();
    for edge in &mut out.edges {
        let (c, f) = state(edge.key);
        if !(0.0..=1.0).contains(&f) {
            return Err(invalid("fidelity", format!("{f} is outside [0, 1]")));
        }
        edge.capacity = c;
        edge.fidelity = f;
        edge.active = c > 0;
    }
    out.phase = Phase::Initialized;
    Ok(out)
}

/// Removes edges that cannot give every one of `l_max` paths a pair.
pub fn deactivate_low_capacity_edges(net: &Network, l_max: u32) -> Result<Network> {
    if net.phase != Phase::Purified {
        return Err(Error::PhaseMismatch {
            expected: Phase::Purified,
            actual: net.phase,
        });
    }
    let mut out = net.clone();
    for edge in &mut out.edges {
        if edge.capacity < l_max {
            edge.active = false;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureMode {
    Edge,
    Node,
}

impl std::str::FromStr for FailureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edge" => Ok(FailureMode::Edge),
            "node" => Ok(FailureMode::Node),
            _ => Err(invalid("mode", format!("unknown failure mode `{s}`"))),
        }
    }
}

/// Elements failed by [`inject_failures`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailedElements {
    Edges(Vec<EdgeKey>),
    Nodes(Vec<NodeId>),
}

/// Fails `count` distinct elements drawn uniformly from the utilized ones.
/// A failed node takes every incident edge down with it.
pub fn inject_failures<R: Rng + ?Sized>(
    net: &Network,
    mode: FailureMode,
    count: usize,
    utilized_edges: &[EdgeKey],
    utilized_nodes: &[NodeId],
    rng: &mut R,
) -> Result<(Network, FailedElements)> {
    if count == 0 {
        return Err(invalid("count", "at least one element must fail"));
    }
    let mut out = net.clone();
    match mode {
        FailureMode::Edge => {
            let pool = sorted_unique(utilized_edges);
            let chosen = pick(&pool, count, rng)?;
            for &key in &chosen {
                out.deactivate(key);
            }
            Ok((out, FailedElements::Edges(chosen)))
        }
        FailureMode::Node => {
            let pool = sorted_unique(utilized_nodes);
            let chosen = pick(&pool, count, rng)?;
            for edge in &mut out.edges {
                if chosen.iter().any(|&n| edge.key.touches(n)) {
                    edge.active = false;
                }
            }
            Ok((out, FailedElements::Nodes(chosen)))
        }
    }
}

fn sorted_unique<T: Ord + Copy>(items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn pick<T: Copy + Ord, R: Rng + ?Sized>(pool: &[T], count: usize, rng: &mut R) -> Result<Vec<T>> {
    if count > pool.len() {
        return Err(Error::InsufficientTargets {
            requested: count,
            available: pool.len(),
        });
    }
    let mut chosen: Vec<T> = index::sample(rng, pool.len(), count)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Demand and weight stamped on generated requests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequestDefaults {
    pub demand: u32,
    pub weight: f64,
}

impl Default for RequestDefaults {
    fn default() -> Self {
        RequestDefaults {
            demand: 10,
            weight: 1.0,
        }
    }
}

/// Draws `count` requests. With `distance = Some(d)` every pair is offset by
/// exactly `d` columns and `d` rows; otherwise `s` and `t` are any two distinct
/// nodes. Repeated sources, terminals or pairs across requests are allowed.
pub fn generate_requests<R: Rng + ?Sized>(
    net: &Network,
    count: usize,
    distance: Option<u32>,
    defaults: RequestDefaults,
    rng: &mut R,
) -> Result<Vec<Request>> {
    if count == 0 {
        return Err(invalid("count", "at least one request is required"));
    }
    let (rows, cols) = (net.rows, net.cols);
    let mut requests = Vec::with_capacity(count);
    match distance {
        Some(d) => {
            if d == 0 || d >= rows || d >= cols {
                return Err(Error::InvalidDistance {
                    distance: d,
                    rows,
                    cols,
                });
            }
            let mut pairs = Vec::new();
            for sy in 0..rows {
                for sx in 0..cols {
                    for (dx, dy) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                        let tx = i64::from(sx) + dx * i64::from(d);
                        let ty = i64::from(sy) + dy * i64::from(d);
                        if (0..i64::from(cols)).contains(&tx) && (0..i64::from(rows)).contains(&ty) {
                            pairs.push((net.node(sx, sy), net.node(tx as u32, ty as u32)));
                        }
                    }
                }
            }
            for id in 0..count {
                let (source, terminal) = pairs[rng.random_range(0..pairs.len())];
                requests.push(make_request(id, source, terminal, defaults));
            }
        }
        None => {
            let n = net.node_count() as u32;
            for id in 0..count {
                let source = rng.random_range(0..n);
                let mut terminal = rng.random_range(0..n - 1);
                if terminal >= source {
                    terminal += 1;
                }
                requests.push(make_request(id, NodeId(source), NodeId(terminal), defaults));
            }
        }
    }
    Ok(requests)
}

fn make_request(id: usize, source: NodeId, terminal: NodeId, defaults: RequestDefaults) -> Request {
    Request {
        id: id as u32,
        source,
        terminal,
        demand: defaults.demand,
        weight: defaults.weight,
    }
}
