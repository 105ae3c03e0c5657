//! Knock out utilized nodes or edges after routing, reroute on what is
//! left, and compare throughput before and after.

use qroute::harness::{failure_experiment, ExperimentConfig};
use qroute::netmodel::FailureMode;

fn main() -> qroute::Result<()> {
    let cfg = ExperimentConfig {
        replications: 50,
        ..ExperimentConfig::baseline()
    };
    let rows = failure_experiment(&cfg, &[FailureMode::Node, FailureMode::Edge], &[1, 2, 4])?;
    println!(
        "{:<5} {:>2} {:<4} {:>8} {:>8} {:>9} {:>7}",
        "mode", "n", "alg", "before", "after", "retained", "skipped"
    );
    for r in rows {
        println!(
            "{:<5} {:>2} {:<4} {:>8.2} {:>8.2} {:>9.3} {:>7}",
            format!("{:?}", r.mode).to_lowercase(),
            r.count,
            r.algorithm,
            r.before.mean,
            r.after.mean,
            r.retention,
            r.skipped
        );
    }
    Ok(())
}
