//! Analytic drive waveforms: a force channel `f(t)` and a momentum channel `h(t)`.
//!
//! Every transport waveform is built from a normalised profile `P(σ)` with
//! `P(0) = 0`, `P(1) = 1`, `σ = t / duration`:
//!
//! ```text
//! base(t)  = f_start + (f_end − f_start) P(σ)
//! f(t)     = base(t) + aux_gain · base''(t)
//! h(t)     = cd_gain · base'(t)
//! ```
//!
//! The auxiliary gain carries the local correction of the unitarily
//! equivalent protocol; the counterdiabatic gain feeds the momentum channel.
//! Nothing is pre-sampled, so integrators can pick their own grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{drive_coupling, OscillatorParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    /// `P(σ) = σ`
    Linear,
    /// `P(σ) = 10σ³ − 15σ⁴ + 6σ⁵`, flat to second order at both ends.
    Quintic,
    /// `P(σ) = σ + Σₙ aₙ sin(2πnσ)`, n = 1..=len.
    FourierSine(Vec<f64>),
}

impl Profile {
    /// k-th derivative with respect to σ, k ≤ 4.
    pub fn derivative(&self, sigma: f64, k: u32) -> f64 {
        match self {
            Profile::Linear => match k {
                0 => sigma,
                1 => 1.0,
                _ => 0.0,
            },
            Profile::Quintic => {
                let s = sigma;
                match k {
                    0 => s * s * s * (10.0 + s * (-15.0 + 6.0 * s)),
                    1 => s * s * (30.0 + s * (-60.0 + 30.0 * s)),
                    2 => s * (60.0 + s * (-180.0 + 120.0 * s)),
                    3 => 60.0 + s * (-360.0 + 360.0 * s),
                    4 => -360.0 + 720.0 * s,
                    _ => 0.0,
                }
            }
            Profile::FourierSine(coeffs) => {
                let ramp = match k {
                    0 => sigma,
                    1 => 1.0,
                    _ => 0.0,
                };
                let series: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let w = 2.0 * PI * (i + 1) as f64;
                        let phase = w * sigma;
                        // d^k/dσ^k sin(wσ) = w^k sin(wσ + kπ/2)
                        let trig = match k % 4 {
                            0 => phase.sin(),
                            1 => phase.cos(),
                            2 => -phase.sin(),
                            _ => -phase.cos(),
                        };
                        a * w.powi(k as i32) * trig
                    })
                    .sum();
                ramp + series
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriveSample {
    pub t: f64,
    /// Total force channel.
    pub f: f64,
    pub f_dot: f64,
    pub f_ddot: f64,
    /// Momentum channel.
    pub h: f64,
    /// The part of `f` added on top of the transport profile.
    pub auxiliary: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveWaveform {
    duration: f64,
    f_start: f64,
    f_end: f64,
    profile: Profile,
    aux_gain: f64,
    cd_gain: f64,
}

impl DriveWaveform {
    pub fn transport(profile: Profile, f_start: f64, f_end: f64, duration: f64) -> Result<Self> {
        if duration == 0.0 {
            return Err(Error::EmptyWaveform);
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParameter {
                name: "duration",
                value: duration,
                reason: "must be finite and positive",
            });
        }
        for (name, v) in [("f_start", f_start), ("f_end", f_end)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite",
                });
            }
        }
        Ok(Self {
            duration,
            f_start,
            f_end,
            profile,
            aux_gain: 0.0,
            cd_gain: 0.0,
        })
    }

    /// Static force held for `duration`.
    pub fn hold(f: f64, duration: f64) -> Result<Self> {
        Self::transport(Profile::Linear, f, f, duration)
    }

    /// Adds the counterdiabatic momentum drive `h = −ḟ/(mω²)`.
    pub fn with_counterdiabatic(self, params: &OscillatorParams) -> Self {
        Self {
            cd_gain: -1.0 / (params.mass() * params.omega_nominal().powi(2)),
            ..self
        }
    }

    /// Adds the local correction `f̈/ω²` obtained from the counterdiabatic
    /// drive by the momentum-shift transformation `exp(−i ḟ x̂/ω²)`.
    pub fn with_momentum_shift(self, params: &OscillatorParams) -> Self {
        Self {
            aux_gain: 1.0 / params.omega_nominal().powi(2),
            ..self
        }
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn f_start(&self) -> f64 {
        self.f_start
    }

    pub fn f_end(&self) -> f64 {
        self.f_end
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    fn base(&self, t: f64, k: u32) -> f64 {
        let sigma = t / self.duration;
        let span = self.f_end - self.f_start;
        let value = span * self.profile.derivative(sigma, k) / self.duration.powi(k as i32);
        if k == 0 {
            self.f_start + value
        } else {
            value
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if (0.0..=self.duration).contains(&t) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                t,
                duration: self.duration,
            })
        }
    }

    /// Value of the force channel without the range check; callers guarantee
    /// `t ∈ [0, duration]`.
    pub(crate) fn force_unchecked(&self, t: f64) -> f64 {
        self.base(t, 0) + self.aux_gain * self.base(t, 2)
    }

    pub(crate) fn momentum_unchecked(&self, t: f64) -> f64 {
        self.cd_gain * self.base(t, 1)
    }

    pub(crate) fn coupling_unchecked(&self, t: f64, params: &OscillatorParams) -> Complex64 {
        drive_coupling(self.force_unchecked(t), self.momentum_unchecked(t), params)
    }

    pub fn force(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.force_unchecked(t))
    }

    pub fn momentum(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.momentum_unchecked(t))
    }

    /// Ladder coupling κ(t) of the assembled Hamiltonian.
    pub fn coupling(&self, t: f64, params: &OscillatorParams) -> Result<Complex64> {
        self.check(t)?;
        Ok(self.coupling_unchecked(t, params))
    }

    pub fn sample(&self, t: f64) -> Result<DriveSample> {
        self.check(t)?;
        let aux = self.aux_gain * self.base(t, 2);
        Ok(DriveSample {
            t,
            f: self.base(t, 0) + aux,
            f_dot: self.base(t, 1) + self.aux_gain * self.base(t, 3),
            f_ddot: self.base(t, 2) + self.aux_gain * self.base(t, 4),
            h: self.momentum_unchecked(t),
            auxiliary: aux,
        })
    }

    /// `points` equally spaced samples including both endpoints.
    pub fn sample_grid(&self, points: usize) -> Vec<DriveSample> {
        let points = points.max(2);
        (0..points)
            .map(|i| {
                let t = if i + 1 == points {
                    self.duration
                } else {
                    self.duration * i as f64 / (points - 1) as f64
                };
                self.sample(t).expect("grid lies inside the window")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profiles() -> Vec<Profile> {
        vec![
            Profile::Linear,
            Profile::Quintic,
            Profile::FourierSine(vec![-0.1, 0.03, 0.007]),
        ]
    }

    #[test]
    fn endpoints() {
        for p in profiles() {
            assert!(p.derivative(0.0, 0).abs() < 1e-15);
            assert!((p.derivative(1.0, 0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn quintic_boundary_conditions() {
        let p = Profile::Quintic;
        for k in 1..=2 {
            assert_eq!(p.derivative(0.0, k), 0.0);
            assert!(p.derivative(1.0, k).abs() < 1e-12);
        }
        assert!((p.derivative(0.5, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn outside_window_is_error() {
        let w = DriveWaveform::hold(1.0, 2.0).unwrap();
        assert!(matches!(w.sample(-1e-9), Err(Error::OutOfRange { .. })));
        assert!(matches!(w.force(2.0 + 1e-9), Err(Error::OutOfRange { .. })));
        assert!(w.sample(2.0).is_ok());
    }

    #[test]
    fn zero_duration_is_empty() {
        assert!(matches!(DriveWaveform::hold(1.0, 0.0), Err(Error::EmptyWaveform)));
        assert!(DriveWaveform::hold(1.0, -1.0).is_err());
    }

    #[test]
    fn grid_covers_window() {
        let w = DriveWaveform::transport(Profile::Quintic, 0.0, 3.0, 0.7).unwrap();
        let g = w.sample_grid(11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0].t, 0.0);
        assert_eq!(g[10].t, 0.7);
        assert!((g[10].f - 3.0).abs() < 1e-12);
    }

    proptest! {
        // central differences of f, f_dot reproduce f_dot, f_ddot to O(Δt²)
        #[test]
        fn derivatives_are_consistent(
            which in 0usize..3,
            f0 in -5.0f64..5.0,
            f1 in -5.0f64..5.0,
            dur in 0.2f64..3.0,
            sigma in 0.05f64..0.95,
            cd in any::<bool>(),
            ue in any::<bool>(),
        ) {
            let params = OscillatorParams::default();
            let mut w = DriveWaveform::transport(profiles()[which].clone(), f0, f1, dur).unwrap();
            if cd { w = w.with_counterdiabatic(&params); }
            if ue { w = w.with_momentum_shift(&params); }
            let t = sigma * dur;
            let dt = 1e-4 * dur;
            let s = w.sample(t).unwrap();
            let lo = w.sample(t - dt).unwrap();
            let hi = w.sample(t + dt).unwrap();
            let scale = 1.0 + s.f.abs() + s.f_dot.abs() * dur + s.f_ddot.abs() * dur * dur;
            let fd1 = (hi.f - lo.f) / (2.0 * dt);
            let fd2 = (hi.f_dot - lo.f_dot) / (2.0 * dt);
            prop_assert!((fd1 - s.f_dot).abs() * dur < 1e-5 * scale);
            prop_assert!((fd2 - s.f_ddot).abs() * dur * dur < 1e-5 * scale);
        }
    }
}
