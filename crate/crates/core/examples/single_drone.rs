//! Best single drone position for every hour of the demo day.
//!
//! ```text
//! cargo run --release --example single_drone
//! ```

use streetcover::prelude::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/demo/synth.json"))?;
    let (graph, density) = generate_synthetic(&spec)?;
    let g_max = compute_g_max(&RadioConfig::default()).g_max;
    let planner = Planner::new(&graph, g_max);

    println!("slot  point        x        y  covered  total  share");
    for slot in 0..density.num_slots() {
        let r = planner.sdd(&density, slot)?;
        let p = graph.point(r.positions()[0]);
        println!(
            "{slot:>4}  {:>5}  {:>7.1}  {:>7.1}  {:>7}  {:>5}  {:>5.3}",
            p.id,
            p.x,
            p.y,
            r.covered_count,
            r.total_ues,
            r.served_ratio()
        );
    }
    Ok(())
}
