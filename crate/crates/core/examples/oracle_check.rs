//! Greedy against the exhaustive optimum on small random instances.
//!
//! ```text
//! cargo run --release --example oracle_check
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streetcover::cli::oracle_report;
use streetcover::prelude::*;

fn instance(rng: &mut ChaCha8Rng) -> (StreetGraph, DensityProfile) {
    let n = rng.random_range(6..=12);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(0.0..400.0), rng.random_range(0.0..400.0)))
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let d = (pts[a].0 - pts[b].0).hypot(pts[a].1 - pts[b].1);
            if d <= 130.0 {
                edges.push(EdgeSpec::with_length(a, b, d));
            }
        }
    }
    let points = pts
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| StreetPoint::new(i, x, y))
        .collect();
    let counts = (0..n).map(|_| rng.random_range(0..=20)).collect();
    (
        StreetGraph::build(points, edges).expect("valid instance"),
        DensityProfile::from_counts(counts),
    )
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g_max = compute_g_max(&RadioConfig::default()).g_max;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("run  problem  greedy  optimum  ratio  bound  holds");
    for run in 0..12 {
        let (graph, density) = instance(&mut rng);
        let (problem, cfg) = if run % 2 == 0 {
            (Problem::Kdd, PlannerConfig::kdd(3, 0.0))
        } else {
            (Problem::Mindd, PlannerConfig::mindd(0.8, 0.0))
        };
        let r = oracle_report(&graph, &density, 0, g_max, &cfg, problem, None)?;
        println!(
            "{run:>3}  {:>7}  {:>6}  {:>7}  {:>5.3}  {:>5.3}  {}",
            problem.as_str(),
            r.greedy,
            r.optimum.map_or("-".into(), |o| o.to_string()),
            r.ratio.unwrap_or(f64::NAN),
            r.bound,
            r.bound_holds
        );
    }
    Ok(())
}
