//! Time evolution under `H(t) = ω′ a†a + κ(t) a† + κ*(t) a`.
//!
//! Three engines share the same Hamiltonian:
//!
//! * [`propagate_coherent`]: closed-form coherent-state solution, evaluated
//!   by adaptive quadrature. Exact up to quadrature error; used as the oracle.
//! * [`propagate_fock`]: truncated Fock-basis Schrödinger equation.
//! * [`propagate_lindblad`]: density matrix with heating and dephasing.
//!
//! The two numerical engines integrate in the interaction picture of
//! `ω′ a†a`, which removes the fast phase rotation of high Fock levels, and
//! hand back Schrödinger-picture states at every requested time.

mod coherent;
mod fock;
mod frame;
mod lindblad;
mod state;

pub use coherent::{propagate_coherent, propagate_coherent_with, CoherentSample, ORACLE_TOLERANCE};
pub use fock::{fock_dimension, hamiltonian_matrix, propagate_fock, FockOptions, FockSample, TRUNCATION_THRESHOLD};
pub use frame::{displacement_matrix, to_instantaneous_frame, FrameShift, FRAME_DEFECT_LIMIT};
pub use lindblad::{propagate_lindblad, DensitySample, LindbladOptions, NoiseModel};
pub use state::{phonon_stats, DensityState, FockState, PhononSource, PhononStats};

use crate::error::{Error, Result};

/// Sample times must be sorted and lie inside `[0, duration]`.
pub(crate) fn check_times(times: &[f64], duration: f64) -> Result<()> {
    let mut prev = 0.0;
    for &t in times {
        if !(0.0..=duration).contains(&t) {
            return Err(Error::OutOfRange { t, duration });
        }
        if t < prev {
            return Err(Error::InvalidParameter {
                name: "times",
                value: t,
                reason: "sample times must be non-decreasing",
            });
        }
        prev = t;
    }
    Ok(())
}
