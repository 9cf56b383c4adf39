use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::OscillatorParams;
use crate::ode::{Stepper, Tolerance};
use crate::waveform::DriveWaveform;

use super::{check_times, FockState};

/// Largest population tolerated in the top retained Fock level.
pub const TRUNCATION_THRESHOLD: f64 = 1e-10;

/// Smallest dimension whose Poisson tail is negligible for displacements up
/// to `alpha_max`: `⌈|α|² + 6|α| + 10⌉`.
pub fn fock_dimension(alpha_max: f64) -> usize {
    let a = alpha_max.abs();
    (a * a + 6.0 * a + 10.0).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockOptions {
    pub tolerance: Tolerance,
    pub truncation_threshold: f64,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self {
            tolerance: Tolerance::CLOSED,
            truncation_threshold: TRUNCATION_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockSample {
    pub t: f64,
    pub state: FockState,
    /// ⟨a⟩
    pub mean_a: Complex64,
    /// Lab-frame ⟨a†a⟩.
    pub n_lab: f64,
    pub norm: f64,
}

impl FockSample {
    fn new(t: f64, state: FockState) -> Self {
        let n_lab = state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum();
        Self {
            t,
            mean_a: state.mean_a(),
            n_lab,
            norm: state.norm_sqr(),
            state,
        }
    }
}

/// Dense Fock matrix of `H(t)`: `H_{m,m} = ω′ m`, `H_{m+1,m} = κ √(m+1)`.
/// The propagators apply the same entries without forming the matrix.
pub fn hamiltonian_matrix(
    w: &DriveWaveform,
    params: &OscillatorParams,
    t: f64,
    dim: usize,
) -> Result<DMatrix<Complex64>> {
    let kappa = w.coupling(t, params)?;
    let mut h = DMatrix::zeros(dim, dim);
    for m in 0..dim {
        h[(m, m)] = Complex64::new(params.omega_sim() * m as f64, 0.0);
        if m + 1 < dim {
            let s = ((m + 1) as f64).sqrt();
            h[(m + 1, m)] = kappa * s;
            h[(m, m + 1)] = kappa.conj() * s;
        }
    }
    Ok(h)
}

/// Integrates `i ∂ψ/∂t = H(t) ψ` on Fock levels `0..psi0.dim()` and returns
/// the state at each requested time. Aborts if the top level ever holds more
/// than `opts.truncation_threshold`.
pub fn propagate_fock(
    w: &DriveWaveform,
    params: &OscillatorParams,
    psi0: &FockState,
    times: &[f64],
    opts: &FockOptions,
) -> Result<Vec<FockSample>> {
    check_times(times, w.duration())?;
    let dim = psi0.dim();
    let omega = params.omega_sim();
    let sqrt_n: Vec<f64> = (0..=dim).map(|n| (n as f64).sqrt()).collect();

    // interaction picture: y_m = e^{iω′mt} ψ_m
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let k = w.coupling_unchecked(t, params) * Complex64::new(0.0, omega * t).exp();
        let kc = k.conj();
        for m in 0..dim {
            let mut acc = Complex64::default();
            if m > 0 {
                acc += k * y[m - 1] * sqrt_n[m];
            }
            if m + 1 < dim {
                acc += kc * y[m + 1] * sqrt_n[m + 1];
            }
            dy[m] = Complex64::new(acc.im, -acc.re);
        }
    };
    let threshold = opts.truncation_threshold;
    let check = |t: f64, y: &[Complex64]| {
        let top = y[dim - 1].norm_sqr();
        if dim > 1 && top > threshold {
            Err(Error::Truncation {
                t,
                dim,
                population: top,
                threshold,
            })
        } else {
            Ok(())
        }
    };

    let mut y = psi0.amplitudes().to_vec();
    check(0.0, &y)?;
    let mut stepper = Stepper::new(opts.tolerance);
    let mut t_prev = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        stepper.advance(rhs, t_prev, t, &mut y, check)?;
        t_prev = t;
        let mut state = psi0.clone();
        for (m, (dst, src)) in state.amplitudes_mut().iter_mut().zip(&y).enumerate() {
            *dst = src * Complex64::new(0.0, -omega * m as f64 * t).exp();
        }
        out.push(FockSample::new(t, state));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::propagate_coherent;
    use crate::model::{equilibrium_displacement, CoherentAmplitude};
    use crate::protocols::{build, Direction, ProtocolSpec};

    fn params() -> OscillatorParams {
        OscillatorParams::default()
    }

    #[test]
    fn dimension_rule() {
        assert_eq!(fock_dimension(0.0), 10);
        assert_eq!(fock_dimension(1.0), 17);
        assert_eq!(fock_dimension(3.0), 37);
    }

    #[test]
    fn assembled_matrix_reproduces_coupling() {
        let p = params().with_omega_ratio(1.1).unwrap();
        let w = build(&ProtocolSpec::counterdiabatic(0.4, Direction::Backward), &p).unwrap();
        let h = hamiltonian_matrix(&w, &p, 0.1, 6).unwrap();
        assert_eq!(h[(1, 0)], w.coupling(0.1, &p).unwrap());
        assert_eq!(h, h.adjoint());
    }

    #[test]
    fn number_state_is_stationary() {
        let p = params();
        let w = DriveWaveform::hold(0.0, 2.0).unwrap();
        let times: Vec<f64> = (0..=8).map(|i| 0.25 * i as f64).collect();
        for s in propagate_fock(&w, &p, &FockState::number(1, 12), &times, &FockOptions::default()).unwrap() {
            assert!((s.n_lab - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_oracle_on_ue() {
        let p = params();
        let w = build(&ProtocolSpec::unitary_equivalent(0.5, Direction::Backward), &p).unwrap();
        let a0 = equilibrium_displacement(w.f_start(), &p);
        let times: Vec<f64> = (1..=20).map(|i| w.duration() * i as f64 / 20.0).collect();
        let exact = propagate_coherent(&w, &p, a0, &times).unwrap();
        let fock = propagate_fock(&w, &p, &FockState::coherent(a0, 30), &times, &FockOptions::default())
            .unwrap();
        for (e, f) in exact.iter().zip(&fock) {
            assert!((e.alpha.alpha() - f.mean_a).norm() < 1e-6);
            assert!((f.norm - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_conserved_with_frozen_drive() {
        let p = params();
        let f = 0.5 * p.f_max();
        let w = DriveWaveform::hold(f, 3.0).unwrap();
        let kappa = w.coupling(0.0, &p).unwrap();
        let psi0 = FockState::coherent(CoherentAmplitude::new(0.5, 0.3), 25);
        let energy = |s: &FockSample| p.omega_sim() * s.n_lab + 2.0 * (kappa.conj() * s.mean_a).re;
        let samples = propagate_fock(&w, &p, &psi0, &[0.0, 1.0, 2.0, 3.0], &FockOptions::default()).unwrap();
        let e0 = energy(&samples[0]);
        for s in &samples {
            assert!((energy(s) - e0).abs() < 1e-8, "{} vs {}", energy(s), e0);
        }
    }

    #[test]
    fn truncation_breach_reported() {
        let p = params().with_g_max(4.0).unwrap();
        let w = build(&ProtocolSpec::linear(0.5, Direction::Forward), &p).unwrap();
        let err = propagate_fock(&w, &p, &FockState::vacuum(6), &[w.duration()], &FockOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::Truncation { dim: 6, .. }));
    }
}
