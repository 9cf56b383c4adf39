//! Build every protocol family at one shortcut ratio and print a coarse
//! table of the force and momentum channels plus the amplitude audit.
//!
//! cargo run --example waveforms -- 0.6

use sta_transport::prelude::*;
use sta_transport::protocols::{amplitude_audit, design_fourier};

fn main() -> sta_transport::Result<()> {
    let s: f64 = std::env::args().nth(1).map_or(0.6, |a| a.parse().expect("s must be a number"));
    let params = OscillatorParams::default();
    let specs = [
        ProtocolSpec::linear(s, Direction::Forward),
        ProtocolSpec::counterdiabatic(s, Direction::Forward),
        ProtocolSpec::unitary_equivalent(s, Direction::Forward),
        ProtocolSpec::fourier(2, 1.5, Direction::Forward),
    ];
    for spec in &specs {
        let w = build(spec, &params)?;
        let audit = amplitude_audit(&w, &params)?;
        println!(
            "{:<10} T = {:.3}  peak |f|/f_max = {:.3}  peak |h|/h_max = {:.3}{}",
            spec.label(),
            w.duration(),
            audit.peak_force / params.f_max(),
            audit.peak_momentum / params.h_max(),
            if audit.exceeds_budget { "  (over budget)" } else { "" }
        );
        for d in w.sample_grid(6) {
            println!("    t = {:.3}  f = {:+.4e}  h = {:+.4e}", d.t, d.f, d.h);
        }
    }
    let coeffs = design_fourier(2.0 * std::f64::consts::PI * 1.5, 2)?;
    println!("fourier2 sine coefficients at s = 1.5: {coeffs:?}");
    Ok(())
}
