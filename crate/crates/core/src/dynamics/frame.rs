use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{equilibrium_displacement, CoherentAmplitude, OscillatorParams};

use super::{DensityState, FockState};

/// Largest norm (or trace) change a truncated displacement may cause.
pub const FRAME_DEFECT_LIMIT: f64 = 1e-8;

/// Rows `0..dim` of `D(β)` restricted to columns `0..dim`.
///
/// Column n is `D(β)|n⟩ = (a† − β*)ⁿ |β⟩ / √n!`. Row m of `a† v` only needs
/// row m−1 of `v`, so every retained entry is the exact matrix element of the
/// untruncated operator.
pub fn displacement_matrix(beta: Complex64, dim: usize) -> DMatrix<Complex64> {
    let mut d = DMatrix::zeros(dim, dim);
    if dim == 0 {
        return d;
    }
    let coherent = FockState::coherent(CoherentAmplitude(beta), dim);
    d.column_mut(0).copy_from_slice(coherent.amplitudes());
    let bc = beta.conj();
    for n in 1..dim {
        let norm = 1.0 / (n as f64).sqrt();
        for m in 0..dim {
            let raised = if m > 0 {
                d[(m - 1, n - 1)] * (m as f64).sqrt()
            } else {
                Complex64::default()
            };
            d[(m, n)] = (raised - bc * d[(m, n - 1)]) * norm;
        }
    }
    d
}

/// States that can be moved by a phase-space displacement.
pub trait FrameShift: Sized {
    /// Applies `D(β)`.
    fn displaced(&self, beta: Complex64) -> Result<Self>;
}

impl FrameShift for CoherentAmplitude {
    fn displaced(&self, beta: Complex64) -> Result<Self> {
        Ok(CoherentAmplitude(self.0 + beta))
    }
}

impl FrameShift for FockState {
    fn displaced(&self, beta: Complex64) -> Result<Self> {
        let d = displacement_matrix(beta, self.dim());
        let out = &d * self.to_vector();
        let defect = (out.norm_squared() - self.norm_sqr()).abs();
        if defect > FRAME_DEFECT_LIMIT {
            return Err(Error::FrameDefect { defect });
        }
        FockState::from_amplitudes(out.as_slice().to_vec())
    }
}

impl FrameShift for DensityState {
    fn displaced(&self, beta: Complex64) -> Result<Self> {
        let d = displacement_matrix(beta, self.dim());
        let out = &d * self.matrix() * d.adjoint();
        let shifted = DensityState::from_matrix_unchecked(out);
        let defect = (shifted.trace() - self.trace()).abs();
        if defect > FRAME_DEFECT_LIMIT {
            return Err(Error::FrameDefect { defect });
        }
        Ok(shifted)
    }
}

/// Moves a lab-frame state into the frame co-moving with the minimum of the
/// potential at force `f_val`, i.e. applies `D(−α_eq(f_val))`.
pub fn to_instantaneous_frame<S: FrameShift>(
    state: &S,
    f_val: f64,
    params: &OscillatorParams,
) -> Result<S> {
    state.displaced(-equilibrium_displacement(f_val, params).alpha())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{phonon_stats, PhononSource};
    use proptest::prelude::*;

    fn params() -> OscillatorParams {
        OscillatorParams::default()
    }

    #[test]
    fn zero_force_is_identity() {
        let psi = FockState::coherent(CoherentAmplitude::new(0.4, 0.1), 20);
        let out = to_instantaneous_frame(&psi, 0.0, &params()).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn equilibrium_maps_to_vacuum() {
        let p = params();
        let f = p.f_max();
        let eq = equilibrium_displacement(f, &p);
        let c = to_instantaneous_frame(&eq, f, &p).unwrap();
        assert_eq!(c, CoherentAmplitude::VACUUM);
        let psi = to_instantaneous_frame(&FockState::coherent(eq, 30), f, &p).unwrap();
        assert!((psi.amplitudes()[0].norm_sqr() - 1.0).abs() < 1e-10);
        let rho = to_instantaneous_frame(&DensityState::pure(&FockState::coherent(eq, 30)), f, &p).unwrap();
        assert!(phonon_stats(&rho).mean < 1e-10);
    }

    #[test]
    fn vacuum_column_is_coherent_state() {
        let beta = Complex64::new(0.3, -0.7);
        let d = displacement_matrix(beta, 25);
        let c = FockState::coherent(CoherentAmplitude(beta), 25);
        for m in 0..25 {
            assert_eq!(d[(m, 0)], c.amplitudes()[m]);
        }
    }

    #[test]
    fn matrix_elements_match_closed_form() {
        // ⟨1|D(β)|1⟩ = e^{−|β|²/2}(1 − |β|²), ⟨0|D(β)|1⟩ = −β* e^{−|β|²/2}
        let beta = Complex64::new(0.8, 0.2);
        let d = displacement_matrix(beta, 12);
        let g = (-0.5 * beta.norm_sqr()).exp();
        assert!((d[(1, 1)] - g * (1.0 - beta.norm_sqr())).norm() < 1e-15);
        assert!((d[(0, 1)] + beta.conj() * g).norm() < 1e-15);
    }

    #[test]
    fn shifted_number_matches_coherent_rule() {
        // n_inst for a coherent state is |α − α_eq|²
        let p = params();
        let f = 0.6 * p.f_max();
        let a = CoherentAmplitude::new(-0.2, 0.5);
        let psi = to_instantaneous_frame(&FockState::coherent(a, 40), f, &p).unwrap();
        let direct = to_instantaneous_frame(&a, f, &p).unwrap().phonons();
        assert!((psi.phonon_stats().mean - direct).abs() < 1e-10);
    }

    #[test]
    fn undersized_space_is_flagged() {
        let psi = FockState::coherent(CoherentAmplitude::new(1.5, 0.0), 6);
        let psi = FockState::from_amplitudes(psi.amplitudes().to_vec()).unwrap();
        let err = psi.displaced(Complex64::new(2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::FrameDefect { .. }));
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(re in -1.5f64..1.5, im in -1.5f64..1.5, br in -1.0f64..1.0, bi in -1.0f64..1.0) {
            let psi = FockState::coherent(CoherentAmplitude::new(re, im), 50);
            let beta = Complex64::new(br, bi);
            let back = psi.displaced(beta).unwrap().displaced(-beta).unwrap();
            // D(−β)D(β) = 1 exactly, no phase
            for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-9);
            }
        }
    }
}
