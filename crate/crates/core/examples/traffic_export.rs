//! Write the traffic of one baseline trial as Graphviz DOT and JSON.
//!
//! ```bash
//! cargo run --example traffic_export -- /tmp/traffic
//! neato -n -Tsvg /tmp/traffic/traffic_PU.dot > pu.svg
//! ```

use std::fs;
use std::path::PathBuf;

use qroute::harness::{realize, run_trial, ExperimentConfig};
use qroute::netmodel::deactivate_low_capacity_edges;
use qroute::output::{export_traffic, write_json};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "traffic".into()));
    fs::create_dir_all(&dir)?;

    let cfg = ExperimentConfig::baseline();
    let seed = 7;
    let record = run_trial(&cfg, seed)?;
    let net = deactivate_low_capacity_edges(&realize(&cfg, seed)?.network, cfg.routing.l_max)?;

    for res in &record.results {
        let t = export_traffic(&res.outcome, &net);
        let busy = t.edges.iter().filter(|e| e.used > 0).count();
        let dot = dir.join(format!("traffic_{}.dot", res.algorithm));
        fs::write(&dot, t.to_dot())?;
        write_json(
            &t,
            fs::File::create(dir.join(format!("traffic_{}.json", res.algorithm)))?,
        )?;
        println!("{}: {busy} busy edges -> {}", res.algorithm, dot.display());
    }
    Ok(())
}
