//! Generating a reproducible synthetic scenario and saving it as CSV inputs.
//!
//! ```text
//! cargo run --example synthetic_scenario -- [out_dir]
//! ```

use std::path::PathBuf;

use streetcover::prelude::*;
use streetcover::scenario::{corner_points, diurnal_totals};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("streetcover-synth"));
    let spec = SyntheticSpec {
        seed: 42,
        graph: GraphSpec::Streets {
            rows: 5,
            cols: 6,
            block_m: 120.0,
            spacing_m: 10.0,
        },
        hotspots: 3,
        slots: diurnal_totals(1200),
        hotspot_sigma_m: 50.0,
        background: 0.1,
    };
    let (graph, density) = generate_synthetic(&spec)?;
    let (again, _) = generate_synthetic(&spec)?;
    assert_eq!(graph.points(), again.points());

    println!(
        "{} street points, {} edges, {} slots",
        graph.len(),
        graph.edges().len(),
        density.num_slots()
    );
    println!("corner points: {:?}", corner_points(&graph));
    let busiest = (0..density.num_slots())
        .max_by_key(|&t| density.total(t))
        .unwrap_or(0);
    let counts = density.slot(busiest)?;
    let mut top: Vec<_> = (0..graph.len()).collect();
    top.sort_by_key(|&v| std::cmp::Reverse(counts[v]));
    println!(
        "busiest slot {busiest} with {} UEs; densest points:",
        density.total(busiest)
    );
    for &v in &top[..5] {
        let p = graph.point(v);
        println!(
            "  {v:>4} at ({:>6.1}, {:>6.1}): {} UEs",
            p.x, p.y, counts[v]
        );
    }

    std::fs::create_dir_all(&out)?;
    graph.write_csv(out.join("nodes.csv"), out.join("edges.csv"))?;
    density.write_csv(out.join("density.csv"))?;
    println!(
        "wrote nodes.csv, edges.csv and density.csv to {}",
        out.display()
    );
    Ok(())
}
