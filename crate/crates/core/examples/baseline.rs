//! Baseline comparison of the three schedulers on the 8x8 square lattice
//! with requests `[33,66]` and `[63,36]`.
//!
//! ```bash
//! cargo run --release --example baseline
//! ```

use qroute::harness::{replicate, ExperimentConfig};

fn main() -> qroute::Result<()> {
    let cfg = ExperimentConfig::baseline();
    let rep = replicate(&cfg)?;

    println!("{} seeds from {}", cfg.replications, cfg.base_seed);
    println!(
        "{:<4} {:>16} {:>8} {:>8} {:>8} {:>8}",
        "alg", "F (95% CI)", "U_ave", "U_var", "gamma", "J_req"
    );
    for s in &rep.summaries {
        let (lo, hi) = s.throughput.ci95();
        println!(
            "{:<4} {:>6.2} [{:.1},{:.1}] {:>8.3} {:>8.4} {:>8.3} {:>8.3}",
            s.algorithm, s.throughput.mean, lo, hi, s.u_ave.mean, s.u_var.mean, s.gamma.mean, s.j_req.mean
        );
    }
    Ok(())
}
