//! Echo under motional heating and dephasing.
//!
//! cargo run --release --example lindblad_noise

use sta_transport::dynamics::LindbladOptions;
use sta_transport::prelude::*;

fn main() -> sta_transport::Result<()> {
    let params = OscillatorParams::default();
    let cd = ProtocolSpec::counterdiabatic(0.5, Direction::Backward);
    for rate in [0.0, 0.01, 0.05, 0.1] {
        let r = run_echo(&cd, &params, &NoiseModel::heating(rate))?;
        println!("heating {rate:<5} engine {:?}: final_n = {:.4e}", r.engine, r.final_n);
    }
    let thermal = NoiseModel {
        heating_rate: 0.05,
        thermal_nbar: 0.5,
        dephasing_rate: 0.0,
    };
    let r = run_echo(&cd, &params, &thermal)?;
    println!("heating 0.05 toward nbar 0.5: final_n = {:.4e}", r.final_n);

    // coherence of (|0> + |1>)/sqrt 2 in a static trap
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![num_complex::Complex64::new(amp, 0.0); 2];
    psi.resize(6, Default::default());
    let rho0 = DensityState::pure(&FockState::from_amplitudes(psi)?);
    let hold = DriveWaveform::hold(0.0, 5.0)?;
    let times = [1.0, 2.0, 3.0, 4.0, 5.0];
    let out = propagate_lindblad(&hold, &params, &rho0, &NoiseModel::dephasing(0.2), &times, &LindbladOptions::default())?;
    for s in &out {
        println!("t = {}: |rho01| = {:.5}  trace = {:.12}", s.t, s.state.matrix()[(0, 1)].norm(), s.trace);
    }
    Ok(())
}
