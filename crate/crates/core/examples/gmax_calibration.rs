//! Coverage radius as a function of the SNR threshold and hover altitude.
//!
//! ```text
//! cargo run --example gmax_calibration
//! ```

use streetcover::radio::{compute_g_max, path_loss, received_power_at, Propagation, RadioConfig};

fn main() {
    let base = RadioConfig::default();
    let budget = compute_g_max(&base);
    println!(
        "default link: g_max = {:.3} m, slant range = {:.3} m at {} m altitude",
        budget.g_max, budget.slant_range, base.altitude_m
    );
    let pl = path_loss(budget.slant_range, Propagation::Nlos, &base).unwrap();
    let rx = received_power_at(budget.slant_range, Propagation::Nlos, &base).unwrap();
    println!(
        "at the edge: path loss {pl:.2} dB, received {rx:.2} dBm, SNR {:.2} dB",
        rx - base.n0_dbm
    );

    println!("\nalpha_db  g_max_m");
    for alpha in [5.0, 10.0, 15.0, 20.0, 25.0] {
        let cfg = RadioConfig {
            alpha_db: alpha,
            ..base
        };
        println!("{alpha:>8.1}  {:>7.2}", compute_g_max(&cfg).g_max);
    }

    println!("\naltitude_m  g_max_m");
    for h in [30.0, 50.0, 80.0, 100.0, 120.0] {
        let cfg = RadioConfig {
            altitude_m: h,
            ..base
        };
        match cfg.validate() {
            Ok(()) => println!("{h:>10.0}  {:>7.2}", compute_g_max(&cfg).g_max),
            Err(e) => println!("{h:>10.0}  {e}"),
        }
    }
}
