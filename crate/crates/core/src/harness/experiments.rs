use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{inject_failures, FailureMode};
use crate::scheduler::{Algorithm, RoutingParams};

use super::{
    aggregate, realize, replicate, route, stage_rng, utilized_elements, ExperimentConfig, MeanSe, MetricSummary,
    Replication, TrialRecord,
};

/// One variation of a base configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepPoint {
    /// Request offset `d` in both lattice directions.
    Distance(u32),
    K(usize),
    FidelityThreshold(f64),
    /// Arbitrary-pair request count.
    Requests(usize),
    Params(RoutingParams),
}

impl SweepPoint {
    pub fn apply(&self, base: &ExperimentConfig) -> ExperimentConfig {
        let mut cfg = base.clone();
        match *self {
            SweepPoint::Distance(d) => {
                cfg.requests.pairs = None;
                cfg.requests.distance = Some(d);
            }
            SweepPoint::K(k) => cfg.routing.k = k,
            SweepPoint::FidelityThreshold(f) => cfg.scenario.f_th = f,
            SweepPoint::Requests(n) => {
                cfg.requests.pairs = None;
                cfg.requests.distance = None;
                cfg.requests.count = n;
            }
            SweepPoint::Params(p) => cfg.routing = p,
        }
        cfg
    }

    pub fn label(&self) -> String {
        match self {
            SweepPoint::Distance(d) => format!("distance={d}"),
            SweepPoint::K(k) => format!("k={k}"),
            SweepPoint::FidelityThreshold(f) => format!("f_th={f}"),
            SweepPoint::Requests(n) => format!("requests={n}"),
            SweepPoint::Params(p) => format!("l_max={},k={},alpha={},beta={}", p.l_max, p.k, p.alpha, p.beta),
        }
    }
}

/// Replicates the base configuration at every point. Points share seeds, so
/// a point differs from the next only by the swept value.
pub fn sweep(base: &ExperimentConfig, points: &[SweepPoint]) -> Result<Vec<(SweepPoint, Replication)>> {
    points.iter().map(|p| Ok((*p, replicate(&p.apply(base))?))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub params: RoutingParams,
    pub summary: MetricSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub rows: Vec<GridRow>,
    /// Best point per algorithm with its mean objective.
    pub best: Vec<(Algorithm, RoutingParams, f64)>,
}

impl GridSearchResult {
    pub fn best_for(&self, algorithm: Algorithm) -> Option<RoutingParams> {
        self.best.iter().find(|b| b.0 == algorithm).map(|b| b.1)
    }
}

/// Brute-force search of `{l_max, k, alpha, beta}` maximizing the mean of
/// `F + pi1 U_ave - pi2 U_var - pi3 gamma` over the replications. Every grid
/// point is evaluated on the same realizations. Equal objectives resolve to
/// the lexicographically smallest point.
pub fn grid_search_parameters(config: &ExperimentConfig) -> Result<GridSearchResult> {
    config.validate()?;
    let points = match &config.grid {
        Some(g) => g.points(),
        None => vec![config.routing],
    };
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let seeds: Vec<u64> = config.seeds().collect();
    let per_seed: Vec<Vec<TrialRecord>> = seeds
        .par_iter()
        .map(|&seed| {
            let real = realize(config, seed)?;
            points
                .iter()
                .map(|&p| route(&real, &real.network, p, &config.algorithms, config.scenario.p_in))
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (i, &params) in points.iter().enumerate() {
        let records: Vec<TrialRecord> = per_seed.iter().map(|r| r[i].clone()).collect();
        for summary in aggregate(&records, &config.objective) {
            rows.push(GridRow { params, summary });
        }
    }

    let mut best: Vec<(Algorithm, RoutingParams, f64)> = Vec::new();
    for &alg in &config.algorithms {
        let mut top: Option<(RoutingParams, f64)> = None;
        for row in rows.iter().filter(|r| r.summary.algorithm == alg) {
            let score = row.summary.objective.mean;
            if top.is_none_or(|(_, s)| score > s) {
                top = Some((row.params, score));
            }
        }
        if let Some((p, s)) = top {
            best.push((alg, p, s));
        }
    }
    Ok(GridSearchResult { rows, best })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub mode: FailureMode,
    pub count: usize,
    pub algorithm: Algorithm,
    pub before: MeanSe,
    pub after: MeanSe,
    /// `after.mean / before.mean`, zero when nothing was routed before.
    pub retention: f64,
    /// Trials without enough utilized elements to fail.
    pub skipped: usize,
}

fn failure_stream(mode: FailureMode, count: usize) -> u64 {
    let m = match mode {
        FailureMode::Edge => 0,
        FailureMode::Node => 1,
    };
    16 + 64 * m + count as u64
}

/// Routes each trial, fails `count` utilized edges or stations, and routes
/// the same requests again on the damaged network. Failures hit the purified
/// network; no new purification happens.
pub fn failure_experiment(
    config: &ExperimentConfig,
    modes: &[FailureMode],
    counts: &[usize],
) -> Result<Vec<FailureRow>> {
    config.validate()?;
    let seeds: Vec<u64> = config.seeds().collect();
    let cases: Vec<(FailureMode, usize)> = modes
        .iter()
        .flat_map(|&m| counts.iter().map(move |&c| (m, c)))
        .collect();

    // per seed: before record, then Option<after record> per case
    type SeedRun = (TrialRecord, Vec<Option<TrialRecord>>);
    let runs: Vec<SeedRun> = seeds
        .par_iter()
        .map(|&seed| {
            let real = realize(config, seed)?;
            let p_in = config.scenario.p_in;
            let before = route(&real, &real.network, config.routing, &config.algorithms, p_in)?;
            let (edges, nodes) = utilized_elements(&before);
            let mut after = Vec::with_capacity(cases.len());
            for &(mode, count) in &cases {
                if count == 0 {
                    after.push(Some(before.clone()));
                    continue;
                }
                let mut rng = stage_rng(seed, failure_stream(mode, count));
                match inject_failures(&real.network, mode, count, &edges, &nodes, &mut rng) {
                    Ok((damaged, _)) => {
                        after.push(Some(route(&real, &damaged, config.routing, &config.algorithms, p_in)?))
                    }
                    Err(Error::InsufficientTargets { .. }) => after.push(None),
                    Err(e) => return Err(e),
                }
            }
            Ok((before, after))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (ci, &(mode, count)) in cases.iter().enumerate() {
        for &alg in &config.algorithms {
            let mut before = Vec::new();
            let mut after = Vec::new();
            let mut skipped = 0;
            for (b, a) in &runs {
                match &a[ci] {
                    Some(a) => {
                        before.push(b.metrics(alg).map_or(0.0, |m| m.throughput));
                        after.push(a.metrics(alg).map_or(0.0, |m| m.throughput));
                    }
                    None => skipped += 1,
                }
            }
            let before = MeanSe::of(&before);
            let after = MeanSe::of(&after);
            rows.push(FailureRow {
                mode,
                count,
                algorithm: alg,
                retention: if before.mean > 0.0 {
                    after.mean / before.mean
                } else {
                    0.0
                },
                before,
                after,
                skipped,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RequestSweepRow {
    pub requests: usize,
    pub summary: MetricSummary,
    /// Throughput per request, `F / |R|`.
    pub per_request: MeanSe,
}

/// Replicated trials with `n` arbitrary request pairs for each `n` in `counts`.
pub fn request_sweep(config: &ExperimentConfig, counts: &[usize]) -> Result<Vec<RequestSweepRow>> {
    let mut rows = Vec::new();
    for &n in counts {
        let rep = replicate(&SweepPoint::Requests(n).apply(config))?;
        for summary in rep.summaries {
            let per: Vec<f64> = rep
                .records
                .iter()
                .filter_map(|r| r.metrics(summary.algorithm))
                .map(|m| m.throughput / n as f64)
                .collect();
            rows.push(RequestSweepRow {
                requests: n,
                per_request: MeanSe::of(&per),
                summary,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{ObjectiveWeights, ParamGrid};

    fn cfg() -> ExperimentConfig {
        ExperimentConfig {
            replications: 4,
            ..ExperimentConfig::baseline()
        }
    }

    #[test]
    fn single_point_grid() {
        let mut c = cfg();
        c.grid = Some(ParamGrid {
            k: vec![4],
            l_max: vec![10],
            alpha: vec![1.0],
            beta: vec![0.0],
        });
        let res = grid_search_parameters(&c).unwrap();
        assert_eq!(res.rows.len(), 3);
        for alg in Algorithm::ALL {
            let p = res.best_for(alg).unwrap();
            assert_eq!((p.k, p.l_max), (4, 10));
        }
    }

    #[test]
    fn zero_pi_is_pure_throughput() {
        let mut c = cfg();
        c.objective = ObjectiveWeights::default();
        c.grid = Some(ParamGrid {
            k: vec![1, 3, 6],
            l_max: vec![10],
            alpha: vec![1.0],
            beta: vec![1.0],
        });
        let res = grid_search_parameters(&c).unwrap();
        for row in &res.rows {
            assert_eq!(row.summary.objective.mean, row.summary.throughput.mean);
        }
        let c2 = ExperimentConfig {
            grid: Some(ParamGrid {
                k: vec![],
                l_max: vec![10],
                alpha: vec![1.0],
                beta: vec![1.0],
            }),
            ..cfg()
        };
        assert_eq!(grid_search_parameters(&c2).unwrap_err(), Error::EmptyGrid);
    }

    #[test]
    fn zero_failures_change_nothing() {
        let rows = failure_experiment(&cfg(), &[FailureMode::Edge, FailureMode::Node], &[0]).unwrap();
        assert_eq!(rows.len(), 6);
        for r in rows {
            assert_eq!(r.before, r.after);
            assert_eq!(r.skipped, 0);
        }
    }

    #[test]
    fn two_node_failure_keeps_some_flow() {
        // PS can gain: fewer competing paths leave larger shares
        let rows = failure_experiment(&cfg(), &[FailureMode::Node], &[2]).unwrap();
        for r in rows {
            assert!(r.after.mean > 0.0, "{r:?}");
            assert_eq!(r.after.n + r.skipped, 4);
        }
    }

    #[test]
    fn request_sweep_rows() {
        let rows = request_sweep(&cfg(), &[2, 3]).unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            assert!((r.per_request.mean - r.summary.throughput.mean / r.requests as f64).abs() < 1e-9);
        }
    }
}
