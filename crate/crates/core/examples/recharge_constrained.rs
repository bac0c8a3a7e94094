//! Placement restricted to positions a drone can leave to recharge at a pole
//! and still return within its flying budget.
//!
//! ```text
//! cargo run --release --example recharge_constrained
//! ```

use streetcover::energy::{group_assignment, nearest_recharge};
use streetcover::prelude::*;
use streetcover::scenario::corner_points;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/demo/synth.json"))?;
    let (graph, density) = generate_synthetic(&spec)?;
    let g_max = compute_g_max(&RadioConfig::default()).g_max;
    let planner = Planner::new(&graph, g_max);
    let poles = corner_points(&graph);
    let (slot, k) = (16, 8);
    println!("poles at {poles:?}");

    // A rejected candidate still uses up one of the k iterations, so the
    // literal run can end empty when the hotspots lie beyond g_R.
    println!("speed_mps  g_r_m  literal  covered  fill  covered  share");
    for speed in [0.5, 1.0, 2.0, 4.0, 6.0, 10.0] {
        let energy = EnergyConfig {
            speed_mps: speed,
            recharge_point_ids: poles.clone(),
            ..EnergyConfig::default()
        };
        energy.validate()?;
        let g_r = compute_g_r(&energy);
        let cfg = PlannerConfig::ekdd(k, g_max, g_r, poles.clone());
        let literal = planner.ekdd(&density, slot, &cfg)?;
        let filled = planner.ekdd(&density, slot, &PlannerConfig { fill: true, ..cfg })?;
        for r in [&literal, &filled] {
            assert!(
                check_feasibility(&graph, r.positions(), g_max, Some((&poles, g_r))).is_empty()
            );
        }
        println!(
            "{speed:>9.1}  {g_r:>5.0}  {:>7}  {:>7}  {:>4}  {:>7}  {:.3}",
            literal.drones(),
            literal.covered_count,
            filled.drones(),
            filled.covered_count,
            filled.served_ratio()
        );
    }

    let energy = EnergyConfig {
        recharge_point_ids: poles.clone(),
        ..EnergyConfig::default()
    };
    let g_r = compute_g_r(&energy);
    let cfg = PlannerConfig {
        fill: true,
        ..PlannerConfig::ekdd(k, g_max, g_r, poles.clone())
    };
    let r = planner.ekdd(&density, slot, &cfg)?;
    let groups = recharge_groups(r.drones(), energy.p_consume, energy.q_recharge);
    let assignment = group_assignment(r.drones(), groups.group_count);
    println!(
        "\nfill run at {} m/s: at least {} of {} drones recharge at once, {} groups take turns",
        energy.speed_mps,
        groups.n_min,
        r.drones(),
        groups.group_count
    );
    for (&v, group) in r.positions().iter().zip(&assignment) {
        let (pole, d) = nearest_recharge(&graph, v, &poles).expect("position reaches a pole");
        println!("  drone at {v:>5}: group {group}, pole {pole} at {d:.0} m");
    }
    Ok(())
}
