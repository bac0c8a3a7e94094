//! Sweeping drone count and spacing over the demo scenario in parallel.
//!
//! ```text
//! cargo run --release --example parameter_sweep
//! ```

use streetcover::cli::{sweep_scenario, RunConfig, Scenario};
use streetcover::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/demo/synth.json"))?;
    let (graph, density) = generate_synthetic(&spec)?;
    let scenario = Scenario { graph, density };

    let mut cfg = RunConfig {
        slot: 16,
        ..RunConfig::default()
    };
    cfg.resolve()?;
    let mut axes = streetcover::cli::SweepAxes::default();
    axes.push_spec("k=1:10")?;
    axes.push_spec("beta=0,gmax,2gmax")?;
    println!("{} cells", axes.cells());

    let out = sweep_scenario(&cfg, Problem::Kdd, &axes, None, &scenario)?;
    println!("   k  beta=0  beta=g_max  beta=2g_max   (served share)");
    for chunk in out.rows.chunks(3) {
        print!("{:>4}", chunk[0].cell.k);
        for row in chunk {
            let share = row.result.as_ref().map_or(f64::NAN, |r| r.served_ratio());
            print!("  {share:>10.3}");
        }
        println!();
    }
    let bad: Vec<_> = out
        .rows
        .iter()
        .filter(|r| !r.violations.is_empty())
        .collect();
    println!("\ncells with constraint violations: {}", bad.len());
    println!("\nfirst CSV lines:");
    for line in out.csv.lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
