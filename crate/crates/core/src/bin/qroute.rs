use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qroute::config::{parse_config, ConfigError, LoadedConfig, Overrides};
use qroute::harness::{
    failure_experiment, grid_search_parameters, replicate, request_sweep, run_trial, sweep, SweepPoint, TrialRecord,
};
use qroute::netmodel::FailureMode;
use qroute::output::{emit_results, export_traffic, write_aggregate_csv, write_json, write_trials_csv};
use qroute::Algorithm;

#[derive(Parser)]
#[command(
    name = "qroute",
    version,
    about = "Entanglement routing on lattice repeater networks"
)]
struct Cli {
    /// TOML experiment file; defaults apply to every missing key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed, overriding the file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "results")]
    out_dir: PathBuf,
    /// Comma-separated subset of PS, PF, PU.
    #[arg(long, global = true, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    /// Worker threads for replicated runs.
    #[arg(long, global = true, env = "QROUTE_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One trial at the base seed, with traffic exports.
    Run,
    /// Replicated trials with per-trial and aggregate tables.
    Replicate {
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Replicates each value of one swept quantity.
    Sweep {
        /// Request offsets, e.g. `1,2,3,4,5`
        #[arg(long, value_delimiter = ',', group = "axis")]
        distance: Vec<u32>,
        /// Paths per request
        #[arg(long, value_delimiter = ',', group = "axis")]
        k: Vec<usize>,
        /// Purification fidelity thresholds
        #[arg(long, value_delimiter = ',', group = "axis")]
        f_th: Vec<f64>,
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Grid search of the routing parameters over the `[grid]` table.
    Optimize {
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Throughput before and after failing utilized edges or stations.
    Failures {
        #[arg(long, value_delimiter = ',', default_value = "edge,node")]
        modes: Vec<FailureMode>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
        counts: Vec<usize>,
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Metrics against the number of arbitrary requests.
    Requests {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9,10")]
        counts: Vec<usize>,
        #[arg(long)]
        replications: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<qroute::Error> for Failure {
    fn from(e: qroute::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qroute: every trial finished with zero throughput");
            ExitCode::from(3)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("qroute: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("qroute: {m}");
            ExitCode::from(2)
        }
    }
}

fn replications(cmd: &Command) -> Option<usize> {
    match cmd {
        Command::Run => None,
        Command::Replicate { replications }
        | Command::Sweep { replications, .. }
        | Command::Optimize { replications }
        | Command::Failures { replications, .. }
        | Command::Requests { replications, .. } => *replications,
    }
}

fn load(cli: &Cli) -> Result<LoadedConfig, Failure> {
    let mut loaded = match &cli.config {
        Some(p) => parse_config(p)?,
        None => LoadedConfig::defaults(),
    };
    loaded.apply(&Overrides {
        base_seed: cli.seed,
        replications: replications(&cli.command),
        algorithms: cli.algorithms.clone(),
    })?;
    Ok(loaded)
}

fn any_flow<'a>(records: impl IntoIterator<Item = &'a TrialRecord>) -> bool {
    records
        .into_iter()
        .any(|r| r.results.iter().any(|res| res.metrics.throughput > 0.0))
}

/// Returns whether any routed flow was produced.
fn execute(cli: &Cli) -> Result<bool, Failure> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let loaded = load(cli)?;
    let cfg = &loaded.config;
    let out = cli.out_dir.as_path();
    fs::create_dir_all(out)?;
    write_json(&provenance(&loaded), fs::File::create(out.join("config.json"))?)?;

    match &cli.command {
        Command::Run => {
            let rec = run_trial(cfg, cfg.base_seed)?;
            write_trials_csv(std::slice::from_ref(&rec), fs::File::create(out.join("trials.csv"))?)?;
            write_json(&rec, fs::File::create(out.join("record.json"))?)?;
            let real = qroute::harness::realize(cfg, cfg.base_seed)?;
            let net = qroute::netmodel::deactivate_low_capacity_edges(&real.network, cfg.routing.l_max)?;
            for res in &rec.results {
                let t = export_traffic(&res.outcome, &net);
                let tag = res.algorithm.tag();
                fs::write(out.join(format!("traffic_{tag}.dot")), t.to_dot())?;
                write_json(&t, fs::File::create(out.join(format!("traffic_{tag}.json")))?)?;
            }
            report(&rec);
            Ok(any_flow([&rec]))
        }
        Command::Replicate { .. } => {
            let rep = replicate(cfg)?;
            emit_results(out, &rep.records, &rep.summaries)?;
            for s in &rep.summaries {
                println!(
                    "{} F = {:.3} +- {:.3}  U_ave = {:.3}  gamma = {:.3}  J_req = {:.3}",
                    s.algorithm, s.throughput.mean, s.throughput.stderr, s.u_ave.mean, s.gamma.mean, s.j_req.mean
                );
            }
            Ok(any_flow(&rep.records))
        }
        Command::Sweep { distance, k, f_th, .. } => {
            let points: Vec<SweepPoint> = if !distance.is_empty() {
                distance.iter().map(|&d| SweepPoint::Distance(d)).collect()
            } else if !k.is_empty() {
                k.iter().map(|&k| SweepPoint::K(k)).collect()
            } else if !f_th.is_empty() {
                f_th.iter().map(|&f| SweepPoint::FidelityThreshold(f)).collect()
            } else {
                return Err(Failure::Usage("sweep needs --distance, --k or --f-th".into()));
            };
            let mut flow = false;
            for (point, rep) in sweep(cfg, &points)? {
                let dir = out.join(point.label());
                emit_results(&dir, &rep.records, &rep.summaries)?;
                flow |= any_flow(&rep.records);
                for s in &rep.summaries {
                    println!("{} {} F = {:.3}", point.label(), s.algorithm, s.throughput.mean);
                }
            }
            Ok(flow)
        }
        Command::Optimize { .. } => {
            let res = grid_search_parameters(cfg)?;
            let summaries: Vec<_> = res.rows.iter().map(|r| r.summary.clone()).collect();
            write_aggregate_csv(&summaries, fs::File::create(out.join("grid.csv"))?)?;
            write_json(&res, fs::File::create(out.join("grid.json"))?)?;
            for (alg, p, score) in &res.best {
                println!(
                    "{alg} best l_max={} k={} alpha={} beta={} objective={score:.3}",
                    p.l_max, p.k, p.alpha, p.beta
                );
            }
            Ok(res.rows.iter().any(|r| r.summary.throughput.mean > 0.0))
        }
        Command::Failures { modes, counts, .. } => {
            let rows = failure_experiment(cfg, modes, counts)?;
            write_json(&rows, fs::File::create(out.join("failures.json"))?)?;
            for r in &rows {
                println!(
                    "{:?} x{} {}: F {:.3} -> {:.3} (retention {:.3}, skipped {})",
                    r.mode, r.count, r.algorithm, r.before.mean, r.after.mean, r.retention, r.skipped
                );
            }
            Ok(rows.iter().any(|r| r.before.mean > 0.0))
        }
        Command::Requests { counts, .. } => {
            let rows = request_sweep(cfg, counts)?;
            write_json(&rows, fs::File::create(out.join("requests.json"))?)?;
            let summaries: Vec<_> = rows.iter().map(|r| r.summary.clone()).collect();
            write_aggregate_csv(&summaries, fs::File::create(out.join("requests.csv"))?)?;
            for r in &rows {
                println!(
                    "|R|={} {}: F = {:.3}  F/|R| = {:.3}",
                    r.requests, r.summary.algorithm, r.summary.throughput.mean, r.per_request.mean
                );
            }
            Ok(rows.iter().any(|r| r.summary.throughput.mean > 0.0))
        }
    }
}

fn provenance(loaded: &LoadedConfig) -> serde_json::Value {
    serde_json::json!({
        "config": loaded.config,
        "provenance": loaded.provenance,
    })
}

fn report(rec: &TrialRecord) {
    if let Some(reason) = rec.reason {
        println!("seed {}: {}", rec.seed, reason.label());
    }
    for w in &rec.warnings {
        println!("warning: {w}");
    }
    for res in &rec.results {
        let m = &res.metrics;
        println!(
            "{} F = {:.3}  U_ave = {:.3}  U_var = {:.4}  gamma = {:.3}  J_req = {:.3}  J_path = {:.3}",
            res.algorithm, m.throughput, m.u_ave, m.u_var, m.gamma, m.j_req, m.j_path
        );
    }
}
