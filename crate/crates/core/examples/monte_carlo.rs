//! Check the closed-form throughput against a simulation of the
//! probabilistic entanglement swaps on every path.

use qroute::harness::{run_trial, stage_rng, streams, swap_monte_carlo, ExperimentConfig};
use qroute::metrics::throughput;

fn main() -> qroute::Result<()> {
    let cfg = ExperimentConfig::baseline();
    let seed = 3;
    let record = run_trial(&cfg, seed)?;
    let mut rng = stage_rng(seed, streams::SWAPS);
    for res in &record.results {
        let exact = throughput(&res.outcome, &record.requests, cfg.scenario.p_in);
        let est = swap_monte_carlo(&res.outcome, &record.requests, cfg.scenario.p_in, 100_000, &mut rng)?;
        println!(
            "{}: exact {exact:.3}  simulated {:.3} +- {:.3}  ({:+.2} se)",
            res.algorithm,
            est.mean,
            est.stderr,
            (est.mean - exact) / est.stderr
        );
    }
    Ok(())
}
