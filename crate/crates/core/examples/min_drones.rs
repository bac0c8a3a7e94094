//! Fewest drones serving a target share of the UEs, across the day.
//!
//! ```text
//! cargo run --release --example min_drones
//! ```

use streetcover::planners::MinddError;
use streetcover::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/demo/synth.json"))?;
    let (graph, density) = generate_synthetic(&spec)?;
    let g_max = compute_g_max(&RadioConfig::default()).g_max;
    let planner = Planner::new(&graph, g_max);
    let gammas = [0.5, 0.7, 0.9];

    print!("slot  UEs");
    for g in gammas {
        print!("  gamma={g}");
    }
    println!();
    for slot in (0..density.num_slots()).step_by(3) {
        print!("{slot:>4}  {:>4}", density.total(slot));
        for gamma in gammas {
            match planner.mindd(&density, slot, &PlannerConfig::mindd(gamma, g_max)) {
                Ok(r) => print!("  {:>9}", r.drones()),
                Err(MinddError::Infeasible(inf)) => {
                    print!("  {:>9}", format!("-({})", inf.best.drones()))
                }
                Err(e) => return Err(e.into()),
            }
        }
        println!();
    }

    // A target no spacing-feasible deployment can reach.
    match planner.mindd(&density, 16, &PlannerConfig::mindd(1.0, 4.0 * g_max)) {
        Ok(r) => println!(
            "\nunexpectedly reached full coverage with {} drones",
            r.drones()
        ),
        Err(MinddError::Infeasible(inf)) => println!("\nfull coverage at 4 g_max spacing: {inf}"),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}
