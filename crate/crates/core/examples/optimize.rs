//! Grid search over `{k, l_max, alpha, beta}`. Each grid point is scored
//! on the same realizations, so differences between points are paired.

use qroute::harness::{grid_search_parameters, ExperimentConfig, ObjectiveWeights, ParamGrid};

fn main() -> qroute::Result<()> {
    let cfg = ExperimentConfig {
        replications: 40,
        grid: Some(ParamGrid {
            k: vec![4, 10],
            l_max: vec![5, 10, 15],
            alpha: vec![0.0, 1.0, 2.0],
            beta: vec![0.0, 1.0],
        }),
        objective: ObjectiveWeights {
            pi1: 0.0,
            pi2: 10.0,
            pi3: 1.0,
        },
        ..ExperimentConfig::baseline()
    };
    let result = grid_search_parameters(&cfg)?;
    println!("{} grid rows", result.rows.len());
    for (alg, p, score) in &result.best {
        println!(
            "{alg}: k={} l_max={} alpha={} beta={} objective={score:.2}",
            p.k, p.l_max, p.alpha, p.beta
        );
    }
    Ok(())
}
