//! Raising the fidelity threshold forces more purification rounds, which
//! cuts link capacity.

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
    let points: Vec<SweepPoint> = [0.7, 0.75, 0.8, 0.85, 0.9]
        .into_iter()
        .map(SweepPoint::FidelityThreshold)
        .collect();
    for (point, rep) in sweep(&cfg, &points)? {
        print!("{:<10}", point.label());
        for s in &rep.summaries {
            print!(
                "  {} F={:6.2} U_ave={:.3}",
                s.algorithm, s.throughput.mean, s.u_ave.mean
            );
        }
        println!();
    }
    Ok(())
}
