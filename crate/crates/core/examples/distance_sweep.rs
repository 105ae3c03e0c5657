//! Throughput against request distance. Each point places two random
//! pairs whose endpoints differ by `d` in both coordinates.

use qroute::harness::{sweep, ExperimentConfig, SweepPoint};
use qroute::RoutingParams;

fn main() -> qroute::Result<()> {
    let cfg = ExperimentConfig {
        routing: RoutingParams {
            k: 10,
            l_max: 15,
            alpha: 1.0,
            beta: 0.0,
        },
        replications: 100,
        ..ExperimentConfig::default()
    };
    let points: Vec<SweepPoint> = (1..=5).map(SweepPoint::Distance).collect();
    for (point, rep) in sweep(&cfg, &points)? {
        let line: Vec<String> = rep
            .summaries
            .iter()
            .map(|s| {
                format!(
                    "{} {:7.2} (ln {:5.2})",
                    s.algorithm,
                    s.throughput.mean,
                    s.throughput.mean.ln()
                )
            })
            .collect();
        println!("{:<12} {}", point.label(), line.join("   "));
    }
    Ok(())
}
