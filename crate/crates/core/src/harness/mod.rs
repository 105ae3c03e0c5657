//! Seeded trials, replication and the experiment sweeps built on them.
//!
//! A trial is one processing window: sample and purify a lattice, draw the
//! requests, then route the same realization with every selected algorithm.
//! Trial `i` of a replicated run uses seed `base_seed + i`; each random stage
//! draws from its own ChaCha stream of that seed, so results do not depend
//! on which worker ran the trial or in what order.

mod experiments;
mod montecarlo;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metrics::{evaluate, MetricsReport};
use crate::netmodel::{
    build_lattice, deactivate_low_capacity_edges, generate_requests, sample_edge_states, Network, NodeId, Request,
    RequestDefaults, ScenarioParams, TopologyKind,
};
use crate::pathfinder::{build_path_info, find_paths, undersized_k};
use crate::purification::purify_network;
use crate::scheduler::{
    check_feasibility, compute_f_min, schedule, Algorithm, RoutingOutcome, RoutingParams, SchedulerStats,
    SchedulingInput,
};

pub use experiments::{
    failure_experiment, grid_search_parameters, request_sweep, sweep, FailureRow, GridRow, GridSearchResult,
    RequestSweepRow, SweepPoint,
};
pub use montecarlo::{swap_monte_carlo, MonteCarloEstimate};

/// Random stream of a trial seed used by each stage.
pub mod streams {
    pub const EDGES: u64 = 0;
    pub const REQUESTS: u64 = 1;
    pub const FAILURES: u64 = 2;
    pub const SWAPS: u64 = 3;
}

pub fn stage_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub rows: u32,
    pub cols: u32,
    pub kind: TopologyKind,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec {
            rows: 8,
            cols: 8,
            kind: TopologyKind::Square,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequestConfig {
    pub count: usize,
    /// Column and row offset of every generated pair; `None` draws arbitrary pairs.
    pub distance: Option<u32>,
    /// Explicit `[[sx, sy], [tx, ty]]` pairs; overrides `count` and `distance`.
    pub pairs: Option<Vec<[[u32; 2]; 2]>>,
    pub demand: u32,
    pub weight: f64,
}

impl Default for RequestConfig {
    fn default() -> Self {
        RequestConfig {
            count: 2,
            distance: Some(3),
            pairs: None,
            demand: 10,
            weight: 1.0,
        }
    }
}

/// `pi1, pi2, pi3` of the parameter objective
/// `F + pi1 * U_ave - pi2 * U_var - pi3 * gamma`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    pub pi1: f64,
    pub pi2: f64,
    pub pi3: f64,
}

impl ObjectiveWeights {
    pub fn score(&self, m: &MetricsReport) -> f64 {
        m.throughput + self.pi1 * m.u_ave - self.pi2 * m.u_var - self.pi3 * m.gamma
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub k: Vec<usize>,
    pub l_max: Vec<u32>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl ParamGrid {
    /// Grid points ordered lexicographically by `(l_max, k, alpha, beta)`.
    pub fn points(&self) -> Vec<RoutingParams> {
        let mut l_max = self.l_max.clone();
        l_max.sort_unstable();
        let mut k = self.k.clone();
        k.sort_unstable();
        let mut alpha = self.alpha.clone();
        alpha.sort_by(f64::total_cmp);
        let mut beta = self.beta.clone();
        beta.sort_by(f64::total_cmp);
        let mut out = Vec::new();
        for &l in &l_max {
            for &kk in &k {
                for &a in &alpha {
                    for &b in &beta {
                        out.push(RoutingParams {
                            k: kk,
                            l_max: l,
                            alpha: a,
                            beta: b,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioParams,
    pub lattice: LatticeSpec,
    pub routing: RoutingParams,
    pub grid: Option<ParamGrid>,
    pub requests: RequestConfig,
    pub algorithms: Vec<Algorithm>,
    pub replications: usize,
    pub base_seed: u64,
    pub objective: ObjectiveWeights,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: ScenarioParams::default(),
            lattice: LatticeSpec::default(),
            routing: RoutingParams::default(),
            grid: None,
            requests: RequestConfig::default(),
            algorithms: Algorithm::ALL.to_vec(),
            replications: 200,
            base_seed: 0,
            objective: ObjectiveWeights::default(),
        }
    }
}

impl ExperimentConfig {
    /// 8x8 square lattice, `C0 = 100`, requests `[33,66]` and `[63,36]`,
    /// `{l_max, k, alpha, beta} = {10, 10, 1, 1}`.
    pub fn baseline() -> Self {
        ExperimentConfig {
            requests: RequestConfig {
                pairs: Some(vec![[[3, 3], [6, 6]], [[6, 3], [3, 6]]]),
                ..RequestConfig::default()
            },
            ..ExperimentConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.routing.validate()?;
        if self.lattice.rows < 2 || self.lattice.cols < 2 {
            return Err(Error::InvalidDimension {
                rows: self.lattice.rows,
                cols: self.lattice.cols,
            });
        }
        if self.replications == 0 {
            return Err(invalid("replications", "must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("algorithms", "select at least one algorithm"));
        }
        if self.requests.weight.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(invalid("weight", "must be positive"));
        }
        if self.requests.demand == 0 {
            return Err(invalid("demand", "must be positive"));
        }
        match &self.requests.pairs {
            Some(pairs) => {
                if pairs.is_empty() {
                    return Err(invalid("pairs", "list is empty"));
                }
                for [s, t] in pairs {
                    for [x, y] in [s, t] {
                        if *x >= self.lattice.cols || *y >= self.lattice.rows {
                            return Err(invalid("pairs", format!("node ({x}, {y}) is outside the lattice")));
                        }
                    }
                    if s == t {
                        return Err(invalid("pairs", "source and terminal must differ"));
                    }
                }
            }
            None => {
                if self.requests.count == 0 {
                    return Err(invalid("count", "at least one request is required"));
                }
                if let Some(d) = self.requests.distance {
                    if d == 0 || d >= self.lattice.rows || d >= self.lattice.cols {
                        return Err(Error::InvalidDistance {
                            distance: d,
                            rows: self.lattice.rows,
                            cols: self.lattice.cols,
                        });
                    }
                }
            }
        }
        if let Some(grid) = &self.grid {
            if grid.points().is_empty() {
                return Err(Error::EmptyGrid);
            }
            for p in grid.points() {
                p.validate()?;
            }
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.replications as u64).map(|i| self.base_seed.wrapping_add(i))
    }
}

/// A purified network and the requests of one processing window.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub seed: u64,
    pub network: Network,
    pub requests: Vec<Request>,
    pub sample_us: u64,
    pub purify_us: u64,
}

/// Steps 0 and 1 up to (not including) the `l_max` cut, which depends on the
/// routing parameters.
pub fn realize(config: &ExperimentConfig, seed: u64) -> Result<Realization> {
    let lattice = build_lattice(config.lattice.rows, config.lattice.cols, config.lattice.kind)?;
    let t0 = Instant::now();
    let initialized = sample_edge_states(&lattice, &config.scenario, &mut stage_rng(seed, streams::EDGES))?;
    let t1 = Instant::now();
    let network = purify_network(&initialized, config.scenario.f_th)?;
    let t2 = Instant::now();

    let defaults = RequestDefaults {
        demand: config.requests.demand,
        weight: config.requests.weight,
    };
    let requests = match &config.requests.pairs {
        Some(pairs) => pairs
            .iter()
            .enumerate()
            .map(|(i, [s, t])| Request {
                id: i as u32,
                source: network.node(s[0], s[1]),
                terminal: network.node(t[0], t[1]),
                demand: defaults.demand,
                weight: defaults.weight,
            })
            .collect(),
        None => generate_requests(
            &network,
            config.requests.count,
            config.requests.distance,
            defaults,
            &mut stage_rng(seed, streams::REQUESTS),
        )?,
    };
    Ok(Realization {
        seed,
        network,
        requests,
        sample_us: (t1 - t0).as_micros() as u64,
        purify_us: (t2 - t1).as_micros() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReasonCode {
    NoActiveEdges,
    NoPaths,
}

impl ReasonCode {
    pub fn label(self) -> &'static str {
        match self {
            ReasonCode::NoActiveEdges => "no active edges",
            ReasonCode::NoPaths => "no paths",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub edges: usize,
    pub active_after_purification: usize,
    pub active_after_pruning: usize,
    pub mean_capacity: f64,
    pub f_min: Option<u32>,
    pub paths: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmResult {
    pub algorithm: Algorithm,
    pub outcome: RoutingOutcome,
    pub metrics: MetricsReport,
    pub schedule_us: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub params: RoutingParams,
    pub network: NetworkSummary,
    pub requests: Vec<Request>,
    pub results: Vec<AlgorithmResult>,
    pub reason: Option<ReasonCode>,
    pub warnings: Vec<String>,
    pub sample_us: u64,
    pub purify_us: u64,
    pub paths_us: u64,
}

impl TrialRecord {
    pub fn result(&self, algorithm: Algorithm) -> Option<&AlgorithmResult> {
        self.results.iter().find(|r| r.algorithm == algorithm)
    }

    pub fn metrics(&self, algorithm: Algorithm) -> Option<&MetricsReport> {
        self.result(algorithm).map(|r| &r.metrics)
    }
}

/// Steps 1 (pruning) through 5 on a realization. Every algorithm sees the
/// same pruned graph and path set.
pub fn route(
    realization: &Realization,
    network: &Network,
    params: RoutingParams,
    algorithms: &[Algorithm],
    p_in: f64,
) -> Result<TrialRecord> {
    let pruned = deactivate_low_capacity_edges(network, params.l_max)?;
    let mut summary = NetworkSummary {
        edges: network.edges().len(),
        active_after_purification: network.active_edge_count(),
        active_after_pruning: pruned.active_edge_count(),
        mean_capacity: mean_capacity(&pruned),
        f_min: None,
        paths: 0,
    };
    let mut record = TrialRecord {
        seed: realization.seed,
        params,
        network: summary.clone(),
        requests: realization.requests.clone(),
        results: Vec::new(),
        reason: None,
        warnings: Vec::new(),
        sample_us: realization.sample_us,
        purify_us: realization.purify_us,
        paths_us: 0,
    };
    let requests = &realization.requests;

    let f_min = match compute_f_min(&pruned, params.l_max) {
        Ok(f) => f,
        Err(Error::NoActiveEdge) => {
            record.reason = Some(ReasonCode::NoActiveEdges);
            record.results = empty_results(algorithms, &pruned, requests, p_in);
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    summary.f_min = Some(f_min);

    let t0 = Instant::now();
    let paths = find_paths(&pruned, requests, params.k);
    let info = build_path_info(&paths);
    record.paths_us = t0.elapsed().as_micros() as u64;
    summary.paths = paths.len();
    record.network = summary;

    for id in undersized_k(requests, params.k, f_min) {
        record.warnings.push(format!(
            "request {id}: k * f_min = {} is below its demand",
            params.k as u64 * u64::from(f_min)
        ));
    }
    if paths.is_empty() {
        record.reason = Some(ReasonCode::NoPaths);
        record.results = empty_results(algorithms, &pruned, requests, p_in);
        return Ok(record);
    }

    let input = SchedulingInput {
        net: &pruned,
        paths: &paths,
        info: &info,
        params,
        f_min,
    };
    for &algorithm in algorithms {
        let t = Instant::now();
        let outcome = schedule(algorithm, &input);
        let schedule_us = t.elapsed().as_micros() as u64;
        if let Err(v) = check_feasibility(&outcome, &pruned) {
            panic!(
                "{algorithm} overloads edge {} ({} > {}) for seed {}",
                v.edge, v.used, v.capacity, realization.seed
            );
        }
        let metrics = evaluate(&outcome, &pruned, requests, p_in);
        record.results.push(AlgorithmResult {
            algorithm,
            outcome,
            metrics,
            schedule_us,
        });
    }
    Ok(record)
}

fn mean_capacity(net: &Network) -> f64 {
    let n = net.active_edge_count();
    if n == 0 {
        return 0.0;
    }
    net.active_edges().map(|e| f64::from(e.capacity)).sum::<f64>() / n as f64
}

fn empty_results(algorithms: &[Algorithm], net: &Network, requests: &[Request], p_in: f64) -> Vec<AlgorithmResult> {
    algorithms
        .iter()
        .map(|&algorithm| {
            let outcome = RoutingOutcome {
                algorithm,
                paths: Vec::new(),
                stats: SchedulerStats::default(),
            };
            let metrics = evaluate(&outcome, net, requests, p_in);
            AlgorithmResult {
                algorithm,
                outcome,
                metrics,
                schedule_us: 0,
            }
        })
        .collect()
}

/// One full processing window for `config` at `seed`, at the config's point
/// routing parameters.
pub fn run_trial(config: &ExperimentConfig, seed: u64) -> Result<TrialRecord> {
    let realization = realize(config, seed)?;
    route(
        &realization,
        &realization.network,
        config.routing,
        &config.algorithms,
        config.scenario.p_in,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Serial,
    Parallel,
}

/// Mean and standard error of one metric over the trials where it is defined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MeanSe::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        MeanSe { mean, stderr, n }
    }

    /// Normal-approximation 95% interval.
    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub algorithm: Algorithm,
    pub params: RoutingParams,
    pub throughput: MeanSe,
    pub min_flow: MeanSe,
    pub u_ave: MeanSe,
    pub u_var: MeanSe,
    pub gamma: MeanSe,
    pub j_req: MeanSe,
    pub j_path: MeanSe,
    pub objective: MeanSe,
    pub degenerate_trials: usize,
}

/// Per-algorithm summaries over trial records that share routing parameters.
pub fn aggregate(records: &[TrialRecord], objective: &ObjectiveWeights) -> Vec<MetricSummary> {
    let mut by_alg: BTreeMap<Algorithm, Vec<&MetricsReport>> = BTreeMap::new();
    let mut degenerate: BTreeMap<Algorithm, usize> = BTreeMap::new();
    for rec in records {
        for res in &rec.results {
            by_alg.entry(res.algorithm).or_default().push(&res.metrics);
            if rec.reason.is_some() {
                *degenerate.entry(res.algorithm).or_default() += 1;
            }
        }
    }
    let params = records.first().map(|r| r.params).unwrap_or_default();
    by_alg
        .into_iter()
        .map(|(algorithm, ms)| {
            let pick = |f: &dyn Fn(&MetricsReport) -> Option<f64>| -> MeanSe {
                MeanSe::of(&ms.iter().filter_map(|m| f(m)).collect::<Vec<_>>())
            };
            MetricSummary {
                algorithm,
                params,
                throughput: pick(&|m| Some(m.throughput)),
                min_flow: pick(&|m| Some(m.min_flow)),
                u_ave: pick(&|m| (!m.flags.no_traffic).then_some(m.u_ave)),
                u_var: pick(&|m| (!m.flags.no_traffic).then_some(m.u_var)),
                gamma: pick(&|m| (!m.flags.gamma_undefined).then_some(m.gamma)),
                j_req: pick(&|m| (!m.flags.j_req_undefined).then_some(m.j_req)),
                j_path: pick(&|m| (!m.flags.j_path_undefined).then_some(m.j_path)),
                objective: pick(&|m| Some(objective.score(m))),
                degenerate_trials: degenerate.get(&algorithm).copied().unwrap_or(0),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<MetricSummary>,
}

impl Replication {
    pub fn summary(&self, algorithm: Algorithm) -> Option<&MetricSummary> {
        self.summaries.iter().find(|s| s.algorithm == algorithm)
    }
}

pub fn replicate(config: &ExperimentConfig) -> Result<Replication> {
    replicate_with(config, Execution::Parallel)
}

pub fn replicate_with(config: &ExperimentConfig, execution: Execution) -> Result<Replication> {
    config.validate()?;
    let seeds: Vec<u64> = config.seeds().collect();
    let records: Vec<TrialRecord> = match execution {
        Execution::Serial => seeds.iter().map(|&s| run_trial(config, s)).collect::<Result<_>>()?,
        Execution::Parallel => seeds.par_iter().map(|&s| run_trial(config, s)).collect::<Result<_>>()?,
    };
    let summaries = aggregate(&records, &config.objective);
    Ok(Replication { records, summaries })
}

/// Edges and intermediate stations carrying flow for any algorithm of the
/// record. Request endpoints are never returned as failure candidates.
pub fn utilized_elements(record: &TrialRecord) -> (Vec<crate::netmodel::EdgeKey>, Vec<NodeId>) {
    let endpoints: std::collections::BTreeSet<NodeId> =
        record.requests.iter().flat_map(|r| [r.source, r.terminal]).collect();
    let mut edges = std::collections::BTreeSet::new();
    let mut nodes = std::collections::BTreeSet::new();
    for res in &record.results {
        for p in res.outcome.paths.iter().filter(|p| p.flow > 0) {
            edges.extend(p.path.edges());
            nodes.extend(p.path.nodes.iter().copied().filter(|n| !endpoints.contains(n)));
        }
    }
    (edges.into_iter().collect(), nodes.into_iter().collect())
}
