//! How the peak control amplitude grows as the protocol gets shorter.
//!
//! cargo run --example amplitude_scaling

use sta_transport::experiments::run_amplitude_scaling;
use sta_transport::prelude::*;

fn main() -> sta_transport::Result<()> {
    let params = OscillatorParams::default();
    let s_grid = [0.15, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0, 1.5];
    for template in [
        ProtocolSpec::counterdiabatic(1.0, Direction::Backward),
        ProtocolSpec::unitary_equivalent(1.0, Direction::Backward),
        ProtocolSpec::linear(1.0, Direction::Backward),
    ] {
        let r = run_amplitude_scaling(&template, &s_grid, &params)?;
        println!("{} ({:?}): peak ~ s^{:.4} (+/- {:.1e})", r.label, r.channel, r.exponent, r.std_error);
        for row in &r.rows {
            println!("    s = {:<5} peak = {:.4e}", row.s, row.peak);
        }
    }
    Ok(())
}
