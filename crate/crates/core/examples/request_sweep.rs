//! Aggregate and per-request throughput as the number of arbitrary
//! request pairs grows.

use qroute::harness::{request_sweep, ExperimentConfig};

fn main() -> qroute::Result<()> {
    let cfg = ExperimentConfig {
        replications: 100,
        ..ExperimentConfig::default()
    };
    let counts: Vec<usize> = (2..=10).collect();
    for row in request_sweep(&cfg, &counts)? {
        println!(
            "|R|={:<3} {} F={:7.2} F/|R|={:6.2} J_req={:.3}",
            row.requests,
            row.summary.algorithm,
            row.summary.throughput.mean,
            row.per_request.mean,
            row.summary.j_req.mean
        );
    }
    Ok(())
}
