use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::model::{instantaneous_excitation, CoherentAmplitude, OscillatorParams};
use crate::quadrature::Adaptive;
use crate::waveform::DriveWaveform;

use super::check_times;

/// Absolute quadrature tolerance of the coherent oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherentSample {
    pub t: f64,
    pub alpha: CoherentAmplitude,
    /// Lab-frame phonons |α|².
    pub n_lab: f64,
    /// Phonons relative to the instantaneous equilibrium.
    pub n_inst: f64,
}

/// Coherent states stay coherent under a linear drive:
///
/// ```text
/// α(t) = e^{−iω′t} [ α0 − i ∫₀ᵗ e^{iω′τ} κ(τ) dτ ]
/// ```
///
/// The integral is accumulated segment by segment between requested times.
pub fn propagate_coherent(
    w: &DriveWaveform,
    params: &OscillatorParams,
    alpha0: CoherentAmplitude,
    times: &[f64],
) -> Result<Vec<CoherentSample>> {
    propagate_coherent_with(w, params, alpha0, times, ORACLE_TOLERANCE)
}

pub fn propagate_coherent_with(
    w: &DriveWaveform,
    params: &OscillatorParams,
    alpha0: CoherentAmplitude,
    times: &[f64],
    tolerance: f64,
) -> Result<Vec<CoherentSample>> {
    check_times(times, w.duration())?;
    let omega = params.omega_sim();
    let integrand = |tau: f64| Complex64::new(0.0, omega * tau).exp() * w.coupling_unchecked(tau, params);
    let mut acc = Complex64::default();
    let mut last = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t > last {
            let share = ((t - last) / w.duration()).max(1e-3);
            let (seg, _) = Adaptive::with_tolerance(tolerance * share).integrate(integrand, last, t)?;
            acc += seg;
            last = t;
        }
        let alpha = Complex64::new(0.0, -omega * t).exp() * (alpha0.alpha() - Complex64::i() * acc);
        let alpha = CoherentAmplitude(alpha);
        out.push(CoherentSample {
            t,
            alpha,
            n_lab: alpha.phonons(),
            n_inst: instantaneous_excitation(alpha, w.force_unchecked(t), params),
        });
    }
    Ok(out)
}
