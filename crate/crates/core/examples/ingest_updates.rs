//! Turning raw GPS location updates into a per-slot UE density on the
//! street graph.
//!
//! ```text
//! cargo run --example ingest_updates
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streetcover::prelude::*;
use streetcover::scenario::{
    read_updates, snap_and_aggregate, unproject, BoundingBox, ScenarioConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec {
        seed: 3,
        graph: GraphSpec::Grid {
            rows: 8,
            cols: 9,
            spacing_m: 100.0,
        },
        hotspots: 0,
        slots: vec![0],
        hotspot_sigma_m: 60.0,
        background: 1.0,
    };
    let (graph, _) = generate_synthetic(&spec)?;
    let bbox = BoundingBox::default();

    // Fabricate a morning of updates: users near street points, a few far
    // from any street and a garbled row. Jitter around the west and south
    // edges pushes some updates outside the bounding box.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let midnight = 1_337_558_400i64;
    let mut text = String::from("user_id,timestamp,lat,lon\n");
    for i in 0..400 {
        let p = graph.point(rng.random_range(0..graph.len()));
        let (x, y) = (
            p.x + rng.random_range(-4.0..4.0),
            p.y + rng.random_range(-4.0..4.0),
        );
        let (lat, lon) = unproject(x, y, &bbox);
        let ts = midnight + rng.random_range(6 * 3600..12 * 3600);
        text += &format!("u{},{ts},{lat:.7},{lon:.7}\n", i % 150);
    }
    for i in 0..10 {
        let (lat, lon) = unproject(50.0 + 10.0 * i as f64, 50.0, &bbox);
        text += &format!("indoor{i},{},{lat:.7},{lon:.7}\n", midnight + 8 * 3600);
    }
    text += "broken,not-a-time,39.92,116.445\n";

    let cfg = ScenarioConfig {
        dedup_per_slot: true,
        ..ScenarioConfig::default()
    };
    let (density, report) = snap_and_aggregate(read_updates(text.as_bytes()), &graph, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!("\nslot  scaled UEs");
    for slot in 0..density.num_slots() {
        if density.total(slot) > 0 {
            println!("{slot:>4}  {:>10}", density.total(slot));
        }
    }
    Ok(())
}
