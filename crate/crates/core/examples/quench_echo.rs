//! Quench echo: a fast linear ramp out, then a shortcut protocol back.
//! Shortcuts return the ion to the ground state; the plain ramp does not.
//!
//! cargo run --example quench_echo

use sta_transport::prelude::*;

fn main() -> sta_transport::Result<()> {
    let params = OscillatorParams::default();
    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "s", "linear", "cd", "ue", "fourier1");
    for s in [0.2, 0.4, 0.6, 0.8, 1.0, 1.5] {
        let row: Vec<f64> = [
            ProtocolSpec::linear(s, Direction::Backward),
            ProtocolSpec::counterdiabatic(s, Direction::Backward),
            ProtocolSpec::unitary_equivalent(s, Direction::Backward),
            ProtocolSpec::fourier(1, s, Direction::Backward),
        ]
        .iter()
        .map(|spec| run_echo(spec, &params, &NoiseModel::default()).map(|r| r.final_n).unwrap_or(f64::NAN))
        .collect();
        println!("{s:>5.2} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}", row[0], row[1], row[2], row[3]);
    }

    // distribution left behind by the linear ramp at s = 0.3
    let r = run_echo(&ProtocolSpec::linear(0.3, Direction::Backward), &params, &NoiseModel::default())?;
    println!("linear s=0.3 on {} Fock levels:", r.fock_dim);
    for (n, p) in r.final_distribution.iter().enumerate().take(6) {
        println!("  P({n}) = {p:.4e}");
    }
    Ok(())
}
