//! Local power law of the Fourier protocols near the design frequency.
//! The forward leg is taken as adiabatic so the fit sees only the return.
//!
//! cargo run --release --example fourier_flatness

use sta_transport::experiments::{fit_flatness_exponent, refined_grid, run_robustness_sweep};
use sta_transport::prelude::*;

fn main() -> sta_transport::Result<()> {
    let params = OscillatorParams::default();
    let opts = EchoOptions {
        forward: ForwardLeg::Adiabatic,
        ..Default::default()
    };
    let window = (1e-3, 1e-2);
    let grid = refined_grid(window.0, window.1, 9);
    for order in 1..=3 {
        let spec = ProtocolSpec::fourier(order, 1.5, Direction::Backward);
        let sweep = run_robustness_sweep(&[spec], &grid, &params, &opts)?;
        let fit = fit_flatness_exponent(&sweep, &spec.label(), window)?;
        println!(
            "{}: final_n ~ |delta|^{:.3} (+/- {:.1e}, {} points)",
            fit.label, fit.exponent, fit.std_error, fit.points
        );
    }
    Ok(())
}
