//! The three transport experiments and the scaling audits built on them.
//!
//! * [`run_echo`]: adiabatic forward ramp, protocol under test back to the
//!   start, phonons counted at zero force.
//! * [`run_instantaneous_trace`]: excitation in the co-moving frame at a
//!   series of stop times.
//! * [`run_robustness_sweep`]: echo against a detuned trap, on a grid of
//!   ω′/ω, with [`fit_flatness_exponent`] for the local power law.
//! * [`run_amplitude_scaling`]: peak control amplitude against s.

mod echo;
mod scaling;
mod sweep;
mod trace;

pub use echo::{run_echo, run_echo_with, EchoOptions, EchoResult, ForwardLeg};
pub use scaling::{run_amplitude_scaling, AmplitudeChannel, ScalingResult, ScalingRow};
pub use sweep::{
    default_sweep_grid, fit_flatness_exponent, refined_grid, run_robustness_sweep, AsymmetryRow, FlatnessFit, MONOTONE_WINDOW,
    GridOrdering, SweepEntry, SweepResult,
};
pub use trace::{run_instantaneous_trace, stop_grid, TraceOptions, TracePoint, RETURN_LEG_S};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    fock_dimension, phonon_stats, propagate_coherent, propagate_coherent_with, propagate_fock, propagate_lindblad,
    to_instantaneous_frame, DensityState, FockOptions, FockState, LindbladOptions, NoiseModel, PhononStats,
    ORACLE_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::model::{CoherentAmplitude, OscillatorParams};
use crate::ode::Tolerance;
use crate::waveform::DriveWaveform;

/// Which propagator carries the state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Lindblad when any noise rate is non-zero, otherwise Fock (coherent
    /// for sweeps, where only the final number matters).
    #[default]
    Auto,
    Coherent,
    Fock,
    Lindblad,
}

impl Engine {
    pub(crate) fn resolve(self, noise: &NoiseModel, prefer_coherent: bool) -> Result<Engine> {
        match self {
            Engine::Auto if !noise.is_silent() => Ok(Engine::Lindblad),
            Engine::Auto if prefer_coherent => Ok(Engine::Coherent),
            Engine::Auto => Ok(Engine::Fock),
            Engine::Coherent | Engine::Fock if !noise.is_silent() => Err(Error::InvalidParameter {
                name: "engine",
                value: f64::NAN,
                reason: "noise requires the lindblad engine",
            }),
            e => Ok(e),
        }
    }
}

/// Numerical knobs shared by all experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub engine: Engine,
    /// Fixed Fock dimension; `None` applies the dimension rule to an oracle
    /// estimate of the largest displacement.
    pub fock_dim: Option<usize>,
    pub fock: FockOptions,
    pub lindblad: LindbladOptions,
    /// Absolute tolerance of the coherent oracle.
    pub oracle_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            engine: Engine::Auto,
            fock_dim: None,
            fock: FockOptions::default(),
            lindblad: LindbladOptions::default(),
            oracle_tolerance: ORACLE_TOLERANCE,
        }
    }
}

impl SolverOptions {
    pub fn with_engine(self, engine: Engine) -> Self {
        Self { engine, ..self }
    }

    pub fn with_fock_dim(self, dim: usize) -> Self {
        Self {
            fock_dim: Some(dim),
            ..self
        }
    }

    /// Overrides the relative tolerance of both ODE engines.
    pub fn with_tolerance(self, rtol: f64) -> Self {
        let mut out = self;
        out.fock.tolerance = Tolerance::relative(rtol);
        out.lindblad.tolerance = Tolerance::relative(rtol);
        out
    }
}

/// A state in whichever representation the engine uses.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum LegState {
    Coherent(CoherentAmplitude),
    Pure(FockState),
    Mixed(DensityState),
}

impl LegState {
    pub(crate) fn prepare(engine: Engine, alpha: CoherentAmplitude, dim: usize) -> Self {
        match engine {
            Engine::Coherent | Engine::Auto => LegState::Coherent(alpha),
            Engine::Fock => LegState::Pure(FockState::coherent(alpha, dim)),
            Engine::Lindblad => LegState::Mixed(DensityState::pure(&FockState::coherent(alpha, dim))),
        }
    }

    pub(crate) fn mean_a(&self) -> Complex64 {
        match self {
            LegState::Coherent(a) => a.alpha(),
            LegState::Pure(psi) => psi.mean_a(),
            LegState::Mixed(rho) => rho.mean_a(),
        }
    }

    pub(crate) fn stats(&self, dim: usize) -> PhononStats {
        match self {
            LegState::Coherent(a) => phonon_stats(&(*a, dim.max(fock_dimension(a.alpha().norm())))),
            LegState::Pure(psi) => phonon_stats(psi),
            LegState::Mixed(rho) => phonon_stats(rho),
        }
    }

    /// Mean phonons in the frame co-moving with the minimum at force `f`.
    pub(crate) fn instantaneous_n(&self, f: f64, params: &OscillatorParams) -> Result<f64> {
        Ok(match self {
            LegState::Coherent(a) => to_instantaneous_frame(a, f, params)?.phonons(),
            LegState::Pure(psi) => phonon_stats(&to_instantaneous_frame(psi, f, params)?).mean,
            LegState::Mixed(rho) => phonon_stats(&to_instantaneous_frame(rho, f, params)?).mean,
        })
    }
}

/// Propagates `state` through `w` and returns it at each of `times`.
pub(crate) fn propagate_leg(
    w: &DriveWaveform,
    params: &OscillatorParams,
    state: &LegState,
    times: &[f64],
    noise: &NoiseModel,
    solver: &SolverOptions,
) -> Result<Vec<LegState>> {
    Ok(match state {
        LegState::Coherent(a) => propagate_coherent_with(w, params, *a, times, solver.oracle_tolerance)?
            .into_iter()
            .map(|s| LegState::Coherent(s.alpha))
            .collect(),
        LegState::Pure(psi) => propagate_fock(w, params, psi, times, &solver.fock)?
            .into_iter()
            .map(|s| LegState::Pure(s.state))
            .collect(),
        LegState::Mixed(rho) => propagate_lindblad(w, params, rho, noise, times, &solver.lindblad)?
            .into_iter()
            .map(|s| LegState::Mixed(s.state))
            .collect(),
    })
}

/// Largest |α| the oracle sees along consecutive legs.
pub(crate) fn oracle_peak(legs: &[(&DriveWaveform, &OscillatorParams)], alpha0: CoherentAmplitude) -> Result<f64> {
    const SAMPLES: usize = 256;
    let mut alpha = alpha0;
    let mut peak = alpha.alpha().norm();
    for (w, params) in legs {
        let times: Vec<f64> = (1..=SAMPLES).map(|i| w.duration() * i as f64 / SAMPLES as f64).collect();
        for s in propagate_coherent(w, params, alpha, &times)? {
            peak = peak.max(s.alpha.alpha().norm());
            alpha = s.alpha;
        }
    }
    Ok(peak)
}

/// Dimension for a run whose coherent part peaks at `peak`, padded for the
/// phonons heating can add over `total_time`.
pub(crate) fn choose_dimension(peak: f64, noise: &NoiseModel, total_time: f64) -> usize {
    let heat = noise.heating_rate * total_time;
    let thermal = if noise.heating_rate > 0.0 && noise.thermal_nbar.is_finite() {
        noise.thermal_nbar
    } else {
        0.0
    };
    let spread = heat + thermal;
    fock_dimension((peak * peak + spread).sqrt()) + (20.0 * spread).ceil() as usize
}

/// Least-squares slope of `ln y` against `ln x` and its standard error.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "points",
            value: points.len() as f64,
            reason: "a log-log fit needs at least three points",
        });
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "points",
            value: if x > 0.0 { y } else { x },
            reason: "log-log fit needs positive abscissae and ordinates",
        });
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "points",
            value: 0.0,
            reason: "log-log fit needs at least two distinct abscissae",
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok((slope, (ssr / (n - 2.0) / sxx).sqrt()))
}
