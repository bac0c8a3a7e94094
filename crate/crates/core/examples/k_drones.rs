//! k drones with a minimum spacing, and how spacing and the fill variant
//! change the outcome.
//!
//! ```text
//! cargo run --release --example k_drones
//! ```

use streetcover::planners::SkipReason;
use streetcover::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/demo/synth.json"))?;
    let (graph, density) = generate_synthetic(&spec)?;
    let radio = RadioConfig::default();
    let g_max = compute_g_max(&radio).g_max;
    let planner = Planner::new(&graph, g_max);
    let slot = 16;
    let k = 8;

    println!("k = {k}, slot {slot}, {} UEs", density.total(slot));
    println!("beta_m   fill  drones  covered  share  rejected");
    for beta in [0.0, g_max, 2.0 * g_max, 3.0 * g_max] {
        for fill in [false, true] {
            let cfg = PlannerConfig {
                fill,
                ..PlannerConfig::kdd(k, beta)
            };
            let r = planner.kdd(&density, slot, &cfg)?;
            let rejected = r
                .skipped
                .iter()
                .filter(|s| s.reason == SkipReason::BetaViolation)
                .count();
            println!(
                "{beta:>6.1}  {fill:>5}  {:>6}  {:>7}  {:.3}  {rejected:>8}",
                r.drones(),
                r.covered_count,
                r.served_ratio()
            );
        }
    }

    let r = planner.kdd(&density, slot, &PlannerConfig::kdd(k, g_max))?;
    assert!(check_feasibility(&graph, r.positions(), g_max, None).is_empty());
    let report = evaluate(
        &r.deployment,
        density.slot(slot)?,
        &graph,
        g_max,
        &radio,
        &MetricsConfig::default(),
        streetcover::metrics::bounding_box_area_km2(&graph),
    )?;
    println!("\nbeta = g_max deployment: {:?}", r.positions());
    println!("marginal gains: {:?}", r.per_pick_marginals);
    println!(
        "ASE {:.3} bit/s/Hz, capacity {:.1} Mbps/km^2, per-drone load {:?}",
        report.ase.unwrap_or(0.0),
        report.nc,
        report.per_drone_load
    );
    Ok(())
}
