//! CSV, JSON and DOT serializers. Nothing here recomputes a metric; every
//! number is copied from a trial record or summary.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::harness::{MeanSe, MetricSummary, TrialRecord};
use crate::netmodel::{Network, TopologyKind};
use crate::scheduler::{Algorithm, RoutingOutcome};

/// Column order of the per-trial CSV.
pub const TRIAL_COLUMNS: [&str; 14] = [
    "seed",
    "algorithm",
    "k",
    "l_max",
    "alpha",
    "beta",
    "F",
    "F_min",
    "U_ave",
    "U_var",
    "gamma",
    "J_req",
    "J_path",
    "flags",
];

const AGGREGATE_METRICS: [&str; 8] = ["F", "F_min", "U_ave", "U_var", "gamma", "J_req", "J_path", "objective"];

fn csv_err(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// One row per (trial, algorithm). Degenerate trials carry their reason
/// code alongside the metric flags.
pub fn write_trials_csv<W: Write>(records: &[TrialRecord], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_COLUMNS).map_err(csv_err)?;
    for rec in records {
        for res in &rec.results {
            let m = &res.metrics;
            let mut flags = m.flags.labels();
            if let Some(reason) = rec.reason {
                if !flags.is_empty() {
                    flags.push('|');
                }
                flags.push_str(reason.label());
            }
            let p = rec.params;
            w.write_record([
                rec.seed.to_string(),
                res.algorithm.tag().to_string(),
                p.k.to_string(),
                p.l_max.to_string(),
                p.alpha.to_string(),
                p.beta.to_string(),
                m.throughput.to_string(),
                m.min_flow.to_string(),
                m.u_ave.to_string(),
                m.u_var.to_string(),
                m.gamma.to_string(),
                m.j_req.to_string(),
                m.j_path.to_string(),
                flags,
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()
}

/// One row per (algorithm, parameter point) with mean and standard error
/// columns for every metric.
pub fn write_aggregate_csv<W: Write>(summaries: &[MetricSummary], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "algorithm",
        "k",
        "l_max",
        "alpha",
        "beta",
        "trials",
        "degenerate_trials",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for m in AGGREGATE_METRICS {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_stderr"));
    }
    w.write_record(&header).map_err(csv_err)?;
    for s in summaries {
        let p = s.params;
        let mut row = vec![
            s.algorithm.tag().to_string(),
            p.k.to_string(),
            p.l_max.to_string(),
            p.alpha.to_string(),
            p.beta.to_string(),
            s.throughput.n.to_string(),
            s.degenerate_trials.to_string(),
        ];
        let stats: [&MeanSe; 8] = [
            &s.throughput,
            &s.min_flow,
            &s.u_ave,
            &s.u_var,
            &s.gamma,
            &s.j_req,
            &s.j_path,
            &s.objective,
        ];
        for st in stats {
            row.push(st.mean.to_string());
            row.push(st.stderr.to_string());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmittedFiles {
    pub trials_csv: PathBuf,
    pub aggregate_csv: PathBuf,
    pub records_json: PathBuf,
}

/// Writes `trials.csv`, `aggregate.csv` and `records.json` under `dir`.
pub fn emit_results(dir: &Path, records: &[TrialRecord], summaries: &[MetricSummary]) -> io::Result<EmittedFiles> {
    if records.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no trial records to emit"));
    }
    fs::create_dir_all(dir)?;
    let files = EmittedFiles {
        trials_csv: dir.join("trials.csv"),
        aggregate_csv: dir.join("aggregate.csv"),
        records_json: dir.join("records.json"),
    };
    write_trials_csv(records, io::BufWriter::new(fs::File::create(&files.trials_csv)?))?;
    write_aggregate_csv(summaries, io::BufWriter::new(fs::File::create(&files.aggregate_csv)?))?;
    write_json(records, io::BufWriter::new(fs::File::create(&files.records_json)?))?;
    Ok(files)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilizationClass {
    Low,
    Mid,
    High,
}

impl UtilizationClass {
    /// `u < 0.3` low, `0.3 <= u <= 0.7` mid, `u > 0.7` high.
    pub fn of(u: f64) -> Self {
        if u < 0.3 {
            UtilizationClass::Low
        } else if u <= 0.7 {
            UtilizationClass::Mid
        } else {
            UtilizationClass::High
        }
    }

    pub fn color(self) -> &'static str {
        match self {
            UtilizationClass::Low => "green",
            UtilizationClass::Mid => "gold",
            UtilizationClass::High => "red",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UtilizationClass::Low => "low",
            UtilizationClass::Mid => "mid",
            UtilizationClass::High => "high",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeExport {
    pub id: u32,
    pub label: String,
    pub x: u32,
    pub y: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathFlow {
    pub request: u32,
    pub rank: u32,
    pub flow: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeExport {
    pub a: u32,
    pub b: u32,
    pub capacity: u32,
    pub used: u64,
    /// `None` on edges without flow.
    pub utilization: Option<f64>,
    pub class: Option<UtilizationClass>,
    pub flows: Vec<PathFlow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrafficExport {
    pub algorithm: Algorithm,
    pub rows: u32,
    pub cols: u32,
    pub kind: TopologyKind,
    pub nodes: Vec<NodeExport>,
    pub edges: Vec<EdgeExport>,
}

/// Per-edge traffic of one outcome over every lattice edge.
pub fn export_traffic(outcome: &RoutingOutcome, net: &Network) -> TrafficExport {
    let usage = outcome.edge_usage();
    let nodes = (0..net.node_count() as u32)
        .map(|i| {
            let id = crate::netmodel::NodeId(i);
            let (x, y) = net.coords(id);
            NodeExport {
                id: i,
                label: net.label(id),
                x,
                y,
            }
        })
        .collect();
    let edges = net
        .edges()
        .iter()
        .map(|e| {
            let used = usage.get(&e.key).copied().unwrap_or(0);
            let utilization = (used > 0).then(|| used as f64 / f64::from(e.capacity));
            let flows = outcome
                .paths
                .iter()
                .filter(|p| p.flow > 0 && p.path.edges().any(|k| k == e.key))
                .map(|p| PathFlow {
                    request: p.path.request_id,
                    rank: p.path.rank,
                    flow: p.flow,
                })
                .collect();
            EdgeExport {
                a: e.key.0 .0,
                b: e.key.1 .0,
                capacity: e.capacity,
                used,
                utilization,
                class: utilization.map(UtilizationClass::of),
                flows,
            }
        })
        .collect();
    TrafficExport {
        algorithm: outcome.algorithm,
        rows: net.rows(),
        cols: net.cols(),
        kind: net.kind(),
        nodes,
        edges,
    }
}

impl TrafficExport {
    /// Graphviz description with nodes pinned at lattice coordinates (row 0
    /// on top). Pen width grows with utilization; idle edges are dashed grey.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("graph traffic_{} {{\n", self.algorithm.tag()));
        s.push_str("  node [shape=circle, fixedsize=true, width=0.4];\n");
        for n in &self.nodes {
            s.push_str(&format!(
                "  n{} [label=\"{}\", pos=\"{},{}!\"];\n",
                n.id,
                n.label,
                n.x,
                self.rows - 1 - n.y
            ));
        }
        for e in &self.edges {
            match (e.utilization, e.class) {
                (Some(u), Some(c)) => s.push_str(&format!(
                    "  n{} -- n{} [class=\"{}\", color=\"{}\", penwidth={:.3}, label=\"{:.2}\"];\n",
                    e.a,
                    e.b,
                    c.name(),
                    c.color(),
                    1.0 + 4.0 * u,
                    u
                )),
                _ => s.push_str(&format!("  n{} -- n{} [style=dashed, color=\"grey\"];\n", e.a, e.b)),
            }
        }
        s.push_str("}\n");
        s
    }
}
