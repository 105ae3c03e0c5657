//! Effect of the number of candidate paths per request on stretch and
//! utilization, with the baseline request pairs.

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
        ..ExperimentConfig::baseline()
    };
    let points: Vec<SweepPoint> = (1..=15).map(SweepPoint::K).collect();
    println!("{:<6} {:>28} {:>28}", "", "gamma  PS / PF / PU", "U_ave  PS / PF / PU");
    for (point, rep) in sweep(&cfg, &points)? {
        let g: Vec<String> = rep.summaries.iter().map(|s| format!("{:.3}", s.gamma.mean)).collect();
        let u: Vec<String> = rep.summaries.iter().map(|s| format!("{:.3}", s.u_ave.mean)).collect();
        println!("{:<6} {:>28} {:>28}", point.label(), g.join(" / "), u.join(" / "));
    }
    Ok(())
}
