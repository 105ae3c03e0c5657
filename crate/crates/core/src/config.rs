//! TOML experiment configuration.
//!
//! Every key is optional. Missing keys take the documented defaults and the
//! loaded config records, per key, whether the value came from the file, a
//! command-line flag or the default table.
//!
//! ```toml
//! replications = 200
//! base_seed = 0
//! algorithms = ["PS", "PF", "PU"]
//!
//! [lattice]
//! rows = 8
//! cols = 8
//! kind = "square"        # square | hexagonal | triangular
//!
//! [scenario]
//! c0 = 100
//! f_mean = 0.8
//! f_std = 0.1
//! f_th = 0.8
//! p_in = 0.9
//! p_out = 0.8
//!
//! [routing]
//! k = 10
//! l_max = 10
//! alpha = 1.0
//! beta = 1.0
//!
//! [grid]                 # optional; missing axes use the routing point
//! k = [1, 5, 10]
//!
//! [requests]
//! count = 2
//! distance = 3           # 0 draws arbitrary pairs
//! pairs = [[[3, 3], [6, 6]], [[6, 3], [3, 6]]]
//! demand = 10
//! weight = 1.0
//!
//! [objective]
//! pi1 = 0.0
//! pi2 = 0.0
//! pi3 = 0.0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::harness::{ExperimentConfig, ParamGrid};
use crate::netmodel::TopologyKind;
use crate::scheduler::Algorithm;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}{message}", line_prefix(*line))]
    Syntax { line: Option<usize>, message: String },

    #[error("{}`{key}`: {reason}", line_prefix(*line))]
    Range {
        key: String,
        line: Option<usize>,
        reason: String,
    },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Where a config value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Default,
    File,
    Flag,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Default => "default",
            Source::File => "file",
            Source::Flag => "flag",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    /// Keyed by dotted path, e.g. `scenario.p_in`.
    pub provenance: BTreeMap<String, Source>,
}

impl LoadedConfig {
    pub fn defaults() -> Self {
        let mut provenance = BTreeMap::new();
        for key in KEYS {
            provenance.insert(key.to_string(), Source::Default);
        }
        LoadedConfig {
            config: ExperimentConfig::default(),
            provenance,
        }
    }

    pub fn source(&self, key: &str) -> Option<Source> {
        self.provenance.get(key).copied()
    }

    /// Applies command-line overrides, which win over the file.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        let cfg = &mut self.config;
        let mut mark = |k: &str| {
            self.provenance.insert(k.to_string(), Source::Flag);
        };
        if let Some(s) = o.base_seed {
            cfg.base_seed = s;
            mark("base_seed");
        }
        if let Some(n) = o.replications {
            cfg.replications = n;
            mark("replications");
        }
        if let Some(a) = &o.algorithms {
            cfg.algorithms = a.clone();
            mark("algorithms");
        }
        cfg.validate().map_err(|e| range_error(e, None))
    }

    /// Keys whose value was not set explicitly.
    pub fn defaulted(&self) -> impl Iterator<Item = &str> {
        self.provenance
            .iter()
            .filter(|(_, s)| **s == Source::Default)
            .map(|(k, _)| k.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub base_seed: Option<u64>,
    pub replications: Option<usize>,
    pub algorithms: Option<Vec<Algorithm>>,
}

const KEYS: [&str; 25] = [
    "replications",
    "base_seed",
    "algorithms",
    "lattice.rows",
    "lattice.cols",
    "lattice.kind",
    "scenario.c0",
    "scenario.f_mean",
    "scenario.f_std",
    "scenario.f_th",
    "scenario.p_in",
    "scenario.p_out",
    "routing.k",
    "routing.l_max",
    "routing.alpha",
    "routing.beta",
    "grid",
    "requests.count",
    "requests.distance",
    "requests.pairs",
    "requests.demand",
    "requests.weight",
    "objective.pi1",
    "objective.pi2",
    "objective.pi3",
];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    replications: Option<usize>,
    base_seed: Option<u64>,
    algorithms: Option<Vec<Algorithm>>,
    lattice: Option<LatticeDoc>,
    scenario: Option<ScenarioDoc>,
    routing: Option<RoutingDoc>,
    grid: Option<GridDoc>,
    requests: Option<RequestsDoc>,
    objective: Option<ObjectiveDoc>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeDoc {
    rows: Option<u32>,
    cols: Option<u32>,
    kind: Option<TopologyKind>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    c0: Option<u32>,
    f_mean: Option<f64>,
    f_std: Option<f64>,
    f_th: Option<f64>,
    p_in: Option<f64>,
    p_out: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoutingDoc {
    k: Option<usize>,
    l_max: Option<u32>,
    alpha: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    k: Option<Vec<usize>>,
    l_max: Option<Vec<u32>>,
    alpha: Option<Vec<f64>>,
    beta: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequestsDoc {
    count: Option<usize>,
    distance: Option<u32>,
    pairs: Option<Vec<[[u32; 2]; 2]>>,
    demand: Option<u32>,
    weight: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectiveDoc {
    pi1: Option<f64>,
    pi2: Option<f64>,
    pi3: Option<f64>,
}

pub fn parse_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<LoadedConfig, ConfigError> {
    let doc: Document = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().trim().to_string(),
    })?;

    let mut out = LoadedConfig::defaults();
    let cfg = &mut out.config;
    let prov = &mut out.provenance;
    let mut set = |key: &str| {
        prov.insert(key.to_string(), Source::File);
    };

    macro_rules! take {
        ($src:expr, $dst:expr, $key:expr) => {
            if let Some(v) = $src {
                $dst = v;
                set($key);
            }
        };
    }

    take!(doc.replications, cfg.replications, "replications");
    take!(doc.base_seed, cfg.base_seed, "base_seed");
    take!(doc.algorithms, cfg.algorithms, "algorithms");
    let l = doc.lattice.unwrap_or_default();
    take!(l.rows, cfg.lattice.rows, "lattice.rows");
    take!(l.cols, cfg.lattice.cols, "lattice.cols");
    take!(l.kind, cfg.lattice.kind, "lattice.kind");
    let s = doc.scenario.unwrap_or_default();
    take!(s.c0, cfg.scenario.c0, "scenario.c0");
    take!(s.f_mean, cfg.scenario.f_mean, "scenario.f_mean");
    take!(s.f_std, cfg.scenario.f_std, "scenario.f_std");
    take!(s.f_th, cfg.scenario.f_th, "scenario.f_th");
    take!(s.p_in, cfg.scenario.p_in, "scenario.p_in");
    take!(s.p_out, cfg.scenario.p_out, "scenario.p_out");
    let r = doc.routing.unwrap_or_default();
    take!(r.k, cfg.routing.k, "routing.k");
    take!(r.l_max, cfg.routing.l_max, "routing.l_max");
    take!(r.alpha, cfg.routing.alpha, "routing.alpha");
    take!(r.beta, cfg.routing.beta, "routing.beta");
    if let Some(g) = doc.grid {
        let p = cfg.routing;
        cfg.grid = Some(ParamGrid {
            k: g.k.unwrap_or_else(|| vec![p.k]),
            l_max: g.l_max.unwrap_or_else(|| vec![p.l_max]),
            alpha: g.alpha.unwrap_or_else(|| vec![p.alpha]),
            beta: g.beta.unwrap_or_else(|| vec![p.beta]),
        });
        set("grid");
    }
    let q = doc.requests.unwrap_or_default();
    take!(q.count, cfg.requests.count, "requests.count");
    if let Some(d) = q.distance {
        cfg.requests.distance = (d > 0).then_some(d);
        set("requests.distance");
    }
    if let Some(p) = q.pairs {
        cfg.requests.pairs = Some(p);
        set("requests.pairs");
    }
    take!(q.demand, cfg.requests.demand, "requests.demand");
    take!(q.weight, cfg.requests.weight, "requests.weight");
    let o = doc.objective.unwrap_or_default();
    take!(o.pi1, cfg.objective.pi1, "objective.pi1");
    take!(o.pi2, cfg.objective.pi2, "objective.pi2");
    take!(o.pi3, cfg.objective.pi3, "objective.pi3");

    out.config.validate().map_err(|e| range_error(e, Some(text)))?;
    Ok(out)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Dotted key path of a validation error.
fn key_path(e: &Error) -> String {
    match e {
        Error::InvalidParameter { name, .. } => {
            let section = match *name {
                "c0" | "f_mean" | "f_std" | "f_th" | "p_in" | "p_out" => "scenario.",
                "k" | "l_max" | "alpha" | "beta" => "routing.",
                "count" | "pairs" | "demand" | "weight" => "requests.",
                _ => "",
            };
            format!("{section}{name}")
        }
        Error::InvalidDimension { .. } => "lattice.rows".into(),
        Error::InvalidDistance { .. } => "requests.distance".into(),
        Error::EmptyGrid => "grid".into(),
        _ => String::new(),
    }
}

fn range_error(e: Error, text: Option<&str>) -> ConfigError {
    let key = key_path(&e);
    let line = text.and_then(|t| locate(t, &key));
    let reason = match &e {
        Error::InvalidParameter { reason, .. } => reason.clone(),
        other => other.to_string(),
    };
    ConfigError::Range { key, line, reason }
}

/// Line of `section.key = ...` in the document, if the key is written there.
fn locate(text: &str, path: &str) -> Option<usize> {
    let (section, key) = path.rsplit_once('.').unwrap_or(("", path));
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[') {
            current = h.trim_end_matches(']').trim().to_string();
            if current == path {
                return Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}
