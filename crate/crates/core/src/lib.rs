//! Shortcut-to-adiabaticity transport of a trapped-ion oscillator.
//!
//! The crate designs transport waveforms (linear ramp, counterdiabatic,
//! unitarily equivalent, Fourier), propagates the oscillator through them
//! with an exact coherent-state oracle, a truncated Fock-space integrator or
//! a Lindblad master equation, and runs the quench-echo, instantaneous-frame
//! and trap-detuning experiments on top.
//!
//! ```
//! use sta_transport::prelude::*;
//!
//! let params = OscillatorParams::default();
//! let cd = ProtocolSpec::counterdiabatic(0.4, Direction::Backward);
//! let echo = run_echo(&cd, &params, &NoiseModel::default()).unwrap();
//! assert!(echo.final_n < 1e-8);
//! ```

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod model;
pub mod ode;
pub mod protocols;
pub mod quadrature;
pub mod validate;
pub mod waveform;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::dynamics::{
        phonon_stats, propagate_coherent, propagate_fock, propagate_lindblad, to_instantaneous_frame,
        DensityState, FockState, NoiseModel,
    };
    pub use crate::experiments::{
        run_amplitude_scaling, run_echo, run_echo_with, run_instantaneous_trace, run_robustness_sweep, EchoOptions,
        Engine, ForwardLeg, TraceOptions,
    };
    pub use crate::model::{CoherentAmplitude, OscillatorParams};
    pub use crate::protocols::{build, Direction, ProtocolKind, ProtocolSpec};
    pub use crate::waveform::DriveWaveform;
}
