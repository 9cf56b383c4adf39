//! Coherent states, displacement operators and the instantaneous frame,
//! checked against the exact coherent propagator.
//!
//! cargo run --example frame_transforms

use num_complex::Complex64;
use sta_transport::dynamics::{displacement_matrix, FockOptions, PhononSource};
use sta_transport::model::equilibrium_displacement;
use sta_transport::prelude::*;

fn main() -> sta_transport::Result<()> {
    let params = OscillatorParams::default().with_omega_ratio(1.05)?;
    let beta = Complex64::new(0.8, -0.3);
    let d = displacement_matrix(beta, 30);
    let vac = FockState::vacuum(30).to_vector();
    let shifted = &d * &vac;
    println!("<beta|a|beta> from D(beta)|0>: {:.6}", FockState::from_amplitudes(shifted.iter().copied().collect())?.mean_a());

    // linear ramp from rest, then count phonons about the new minimum
    let w = build(&ProtocolSpec::linear(0.7, Direction::Forward), &params)?;
    let times = [w.duration()];
    let exact = propagate_coherent(&w, &params, CoherentAmplitude::VACUUM, &times)?;
    let fock = propagate_fock(&w, &params, &FockState::vacuum(30), &times, &FockOptions::default())?;
    let f_end = w.force(w.duration())?;
    let inst = to_instantaneous_frame(&fock[0].state, f_end, &params)?;
    println!("equilibrium at f_end: {:.6}", equilibrium_displacement(f_end, &params).alpha());
    println!("oracle:  alpha = {:.6}  n_inst = {:.6e}", exact[0].alpha.alpha(), exact[0].n_inst);
    println!("fock:    <a>   = {:.6}  n_inst = {:.6e}", fock[0].mean_a, inst.phonon_stats().mean);
    Ok(())
}
