//! Echo against a miscalibrated trap, ω′/ω on a grid around 1.
//!
//! cargo run --release --example robustness_sweep

use sta_transport::experiments::{default_sweep_grid, run_robustness_sweep};
use sta_transport::prelude::*;

fn main() -> sta_transport::Result<()> {
    let params = OscillatorParams::default();
    let protocols = [
        ProtocolSpec::counterdiabatic(1.5, Direction::Backward),
        ProtocolSpec::unitary_equivalent(1.5, Direction::Backward),
        ProtocolSpec::fourier(1, 1.5, Direction::Backward),
        ProtocolSpec::linear(1.5, Direction::Backward),
    ];
    let sweep = run_robustness_sweep(&protocols, &default_sweep_grid(), &params, &EchoOptions::default())?;
    let labels = sweep.labels();
    print!("{:>8}", "ratio");
    for l in &labels {
        print!(" {l:>11}");
    }
    println!();
    for &r in &sweep.grid {
        print!("{r:>8.4}");
        for l in &labels {
            print!(" {:>11.3e}", sweep.final_n(l, r).unwrap_or(f64::NAN));
        }
        println!();
    }
    for o in &sweep.orderings {
        println!("{:.3}: {}", o.omega_ratio, o.ranking.join(" < "));
    }
    for a in sweep.asymmetry.iter().filter(|a| a.delta > 0.05) {
        println!("{} asymmetry at delta {:.2}: {:.3}", a.label, a.delta, a.relative);
    }
    for f in &sweep.findings {
        println!("finding: {f}");
    }
    Ok(())
}
