//! Dimensionless model of the dragged harmonic oscillator.
//!
//! The engine works in the static frame
//!
//! ```text
//! H(t) = ω′ a†a + f(t) x̂ + h(t) p̂,    x̂ = x0 (a + a†),   p̂ = i p0 (a† − a)
//! ```
//!
//! with ħ = 1, `x0 = √(1/(2mω))` and `p0 = 1/(2 x0)` fixed by the *nominal*
//! frequency ω. Collecting terms gives `H = ω′ a†a + κ a† + κ* a` with the
//! complex ladder coupling `κ = f x0 + i h p0`.
//!
//! In the laser-driven realisation the oscillator is only seen in the
//! interaction picture, where the drive reads
//! `f x0 (a e^{-i(ωt+φ)} + a† e^{i(ωt+φ)})`. A beam phase φ = 0 feeds the
//! force channel `f x̂`, and φ = −π/2 feeds the momentum channel `h p̂`.
//! Going to the frame rotating at ω turns that into the static form above. A
//! trap-frequency error only changes the oscillator term ω → ω′, while the
//! waveform keeps its designed time dependence and `x0` stays at its nominal
//! value; this is why `omega_sim` enters nowhere but the `a†a` coefficient.
//!
//! Time is measured in periods of the nominal trap, so by default ω = 2π and
//! T0 = 1. Physical units only appear in [`PhysicalCalibration`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    omega_nominal: f64,
    omega_sim: f64,
    g_max: f64,
    mass: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self {
            omega_nominal: 2.0 * PI,
            omega_sim: 2.0 * PI,
            g_max: 1.0,
            mass: 1.0,
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}

impl OscillatorParams {
    /// `g_max` is the largest force-channel coupling `f·x0`, in units of ω.
    pub fn new(omega_nominal: f64, g_max: f64, mass: f64) -> Result<Self> {
        let omega_nominal = positive("omega_nominal", omega_nominal)?;
        Ok(Self {
            omega_nominal,
            omega_sim: omega_nominal,
            g_max: positive("g_max", g_max)?,
            mass: positive("mass", mass)?,
        })
    }

    /// Same design, propagated in a trap at `ratio · ω`.
    pub fn with_omega_ratio(self, ratio: f64) -> Result<Self> {
        let ratio = positive("omega_ratio", ratio)?;
        Ok(Self {
            omega_sim: self.omega_nominal * ratio,
            ..self
        })
    }

    pub fn with_g_max(self, g_max: f64) -> Result<Self> {
        Ok(Self {
            g_max: positive("g_max", g_max)?,
            ..self
        })
    }

    /// Copy with the simulated trap reset to the nominal one.
    pub fn at_nominal(self) -> Self {
        Self {
            omega_sim: self.omega_nominal,
            ..self
        }
    }

    pub fn omega_nominal(&self) -> f64 {
        self.omega_nominal
    }

    pub fn omega_sim(&self) -> f64 {
        self.omega_sim
    }

    pub fn omega_ratio(&self) -> f64 {
        self.omega_sim / self.omega_nominal
    }

    pub fn g_max(&self) -> f64 {
        self.g_max
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Nominal period T0 = 2π/ω.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega_nominal
    }

    pub fn x0(&self) -> f64 {
        (1.0 / (2.0 * self.mass * self.omega_nominal)).sqrt()
    }

    pub fn p0(&self) -> f64 {
        0.5 / self.x0()
    }

    /// Force-channel cap, `f_max = g_max ω / x0`.
    pub fn f_max(&self) -> f64 {
        self.g_max * self.omega_nominal / self.x0()
    }

    /// Momentum-channel scale `h_max = f_max / (m ω)`.
    pub fn h_max(&self) -> f64 {
        self.f_max() / (self.mass * self.omega_nominal)
    }
}

/// Coherent-state displacement in ladder-operator units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitude(pub Complex64);

impl CoherentAmplitude {
    pub const VACUUM: Self = Self(Complex64 { re: 0.0, im: 0.0 });

    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn alpha(&self) -> Complex64 {
        self.0
    }

    /// Mean phonon number |α|².
    pub fn phonons(&self) -> f64 {
        self.0.norm_sqr()
    }
}

impl From<Complex64> for CoherentAmplitude {
    fn from(alpha: Complex64) -> Self {
        Self(alpha)
    }
}

/// Coefficient of a† in the assembled Hamiltonian.
pub fn drive_coupling(f_val: f64, h_val: f64, params: &OscillatorParams) -> Complex64 {
    Complex64::new(f_val * params.x0(), h_val * params.p0())
}

/// Displacement of the ground state of `ω′ a†a + f x̂`, i.e. of the well the
/// ion actually sits in. Equals `q/(2 x0)` with `q = −f/(mω²)` when ω′ = ω.
pub fn equilibrium_displacement(f_val: f64, params: &OscillatorParams) -> CoherentAmplitude {
    CoherentAmplitude::new(-f_val * params.x0() / params.omega_sim(), 0.0)
}

/// Phonons counted in the frame co-moving with the potential minimum.
pub fn instantaneous_excitation(
    state: CoherentAmplitude,
    f_val: f64,
    params: &OscillatorParams,
) -> f64 {
    (state.0 - equilibrium_displacement(f_val, params).0).norm_sqr()
}

/// Optional conversion record between the dimensionless engine and
/// laboratory units. Only the IO layer reads it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalCalibration {
    /// Effective trap frequency ω/2π in kHz.
    pub trap_khz: f64,
    /// Nominal period T0 in µs; one dimensionless time unit.
    pub period_us: f64,
}

impl PhysicalCalibration {
    /// Builds the record from either or both quantities, checking that they
    /// agree (`trap_khz · period_us = 1000`) when both are given.
    pub fn resolve(trap_khz: Option<f64>, period_us: Option<f64>) -> Result<Option<Self>> {
        let (trap_khz, period_us) = match (trap_khz, period_us) {
            (None, None) => return Ok(None),
            (Some(k), None) => {
                let k = positive("trap_khz", k)?;
                (k, 1e3 / k)
            }
            (None, Some(p)) => {
                let p = positive("period_us", p)?;
                (1e3 / p, p)
            }
            (Some(k), Some(p)) => {
                let k = positive("trap_khz", k)?;
                let p = positive("period_us", p)?;
                if ((k * p) / 1e3 - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter {
                        name: "period_us",
                        value: p,
                        reason: "inconsistent with trap_khz (expected period_us = 1000 / trap_khz)",
                    });
                }
                (k, p)
            }
        };
        Ok(Some(Self {
            trap_khz,
            period_us,
        }))
    }

    pub fn to_microseconds(&self, t: f64) -> f64 {
        t * self.period_us
    }

    /// Physical angular frequency (rad/s) of the nominal trap.
    pub fn omega_rad_per_s(&self) -> f64 {
        2.0 * PI * self.trap_khz * 1e3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> OscillatorParams {
        OscillatorParams::default()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(OscillatorParams::new(0.0, 1.0, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, -1.0, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(params().with_omega_ratio(0.0).is_err());
    }

    #[test]
    fn uncertainty_product_is_one_half() {
        for mass in [0.1, 1.0, 7.5] {
            let p = OscillatorParams::new(2.0 * PI, 1.0, mass).unwrap();
            assert!((p.x0() * p.p0() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn coupling_channels() {
        let p = params();
        assert_eq!(drive_coupling(0.0, 0.0, &p), Complex64::new(0.0, 0.0));
        let k = drive_coupling(3.0, 0.0, &p);
        assert_eq!(k.im, 0.0);
        assert!((k.re - 3.0 * p.x0()).abs() < 1e-15);
        // h p̂ = i h p0 (a† − a): the a† coefficient is i h p0.
        let k = drive_coupling(0.0, 2.0, &p);
        assert_eq!(k.re, 0.0);
        assert!((k.im - 2.0 * p.p0()).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_matches_classical_shift() {
        let p = params();
        let f = p.f_max();
        let alpha = equilibrium_displacement(f, &p);
        assert!((alpha.0.re + f * p.x0() / p.omega_nominal()).abs() < 1e-14);
        assert_eq!(alpha.0.im, 0.0);
        // q = −f/(mω²) and Re α = q/(2 x0)
        let q = -f / (p.mass() * p.omega_nominal().powi(2));
        assert!((alpha.0.re - q / (2.0 * p.x0())).abs() < 1e-14);
        // with the default g_max = 1 the displacement is one unit
        assert!((alpha.0.re + 1.0).abs() < 1e-14);

        // H0 evaluated on coherent states is minimal at α_eq
        let energy = |a: f64| p.omega_sim() * a * a + 2.0 * f * p.x0() * a;
        let e0 = energy(alpha.0.re);
        for da in [-1e-3, 1e-3] {
            assert!(energy(alpha.0.re + da) > e0);
        }

        assert_eq!(equilibrium_displacement(0.0, &p), CoherentAmplitude::VACUUM);
        let a1 = equilibrium_displacement(0.7, &p).0.re;
        let a2 = equilibrium_displacement(1.4, &p).0.re;
        assert!((a2 - 2.0 * a1).abs() < 1e-15);
    }

    #[test]
    fn instantaneous_excitation_cases() {
        let p = params();
        let f = p.f_max();
        assert_eq!(instantaneous_excitation(CoherentAmplitude::VACUUM, 0.0, &p), 0.0);
        let eq = equilibrium_displacement(f, &p);
        assert_eq!(instantaneous_excitation(eq, f, &p), 0.0);
        let n = instantaneous_excitation(CoherentAmplitude::VACUUM, f, &p);
        assert!((n - (f * p.x0() / p.omega_nominal()).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn frames_coincide_at_zero_force() {
        let p = params();
        let a = CoherentAmplitude::new(0.3, -1.2);
        assert_eq!(instantaneous_excitation(a, 0.0, &p), a.phonons());
    }

    #[test]
    fn calibration_from_lab_numbers() {
        let c = PhysicalCalibration::resolve(Some(20.0), Some(50.0)).unwrap().unwrap();
        assert_eq!(c.period_us, 50.0);
        assert!((c.to_microseconds(0.5) - 25.0).abs() < 1e-12);
        let c = PhysicalCalibration::resolve(Some(20.0), None).unwrap().unwrap();
        assert!((c.period_us - 50.0).abs() < 1e-12);
        assert!(PhysicalCalibration::resolve(Some(20.0), Some(40.0)).is_err());
        assert!(PhysicalCalibration::resolve(None, None).unwrap().is_none());
    }
}
