use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::OscillatorParams;
use crate::ode::{Stepper, Tolerance};
use crate::waveform::DriveWaveform;

use super::{check_times, DensityState};

/// Motional heating and dephasing. All rates default to zero.
///
/// With heating rate R (quanta per time) and bath occupation n̄ the
/// dissipator is `Γ(n̄+1) D[a] + Γn̄ D[a†]` with `Γ = R/n̄`. `n̄ = ∞` is the
/// pure-heating limit `R (D[a] + D[a†])`, for which `d⟨n⟩/dt = R` exactly.
/// Dephasing adds `γ_φ D[a†a]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default)]
    pub heating_rate: f64,
    #[serde(default = "infinite")]
    pub thermal_nbar: f64,
    #[serde(default)]
    pub dephasing_rate: f64,
}

fn infinite() -> f64 {
    f64::INFINITY
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            heating_rate: 0.0,
            thermal_nbar: f64::INFINITY,
            dephasing_rate: 0.0,
        }
    }
}

impl NoiseModel {
    pub fn heating(rate: f64) -> Self {
        Self {
            heating_rate: rate,
            ..Self::default()
        }
    }

    pub fn dephasing(rate: f64) -> Self {
        Self {
            dephasing_rate: rate,
            ..Self::default()
        }
    }

    pub fn is_silent(&self) -> bool {
        self.heating_rate == 0.0 && self.dephasing_rate == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("heating_rate", self.heating_rate),
            ("dephasing_rate", self.dephasing_rate),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "rate must be finite and non-negative",
                });
            }
        }
        let nbar = self.thermal_nbar;
        if nbar.is_nan() || nbar < 0.0 || (nbar == 0.0 && self.heating_rate > 0.0) {
            return Err(Error::InvalidParameter {
                name: "thermal_nbar",
                value: nbar,
                reason: "bath occupation must be positive when heating is on",
            });
        }
        Ok(())
    }

    /// (rate of D[a], rate of D[a†])
    fn ladder_rates(&self) -> (f64, f64) {
        if self.heating_rate == 0.0 {
            (0.0, 0.0)
        } else if self.thermal_nbar.is_infinite() {
            (self.heating_rate, self.heating_rate)
        } else {
            let gamma = self.heating_rate / self.thermal_nbar;
            (gamma * (self.thermal_nbar + 1.0), self.heating_rate)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LindbladOptions {
    pub tolerance: Tolerance,
    /// Most negative eigenvalue tolerated at a checkpoint.
    pub positivity_floor: f64,
    /// Largest population tolerated in the top Fock level at a checkpoint.
    /// Looser than the closed-system threshold because heated states have
    /// geometric rather than Poissonian tails.
    pub truncation_threshold: f64,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        Self {
            tolerance: Tolerance::LINDBLAD,
            positivity_floor: -1e-6,
            truncation_threshold: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensitySample {
    pub t: f64,
    pub state: DensityState,
    pub mean_a: Complex64,
    pub n_lab: f64,
    pub trace: f64,
}

/// Integrates
///
/// ```text
/// ρ̇ = −i[H(t), ρ] + Γ↓ D[a]ρ + Γ↑ D[a†]ρ + γ_φ D[a†a]ρ,
/// D[L]ρ = LρL† − ½{L†L, ρ}
/// ```
///
/// with truncated ladder operators, which keeps the trace exact. Positivity
/// is checked at every requested time.
pub fn propagate_lindblad(
    w: &DriveWaveform,
    params: &OscillatorParams,
    rho0: &DensityState,
    noise: &NoiseModel,
    times: &[f64],
    opts: &LindbladOptions,
) -> Result<Vec<DensitySample>> {
    check_times(times, w.duration())?;
    noise.validate()?;
    rho0.validate()?;
    let dim = rho0.dim();
    let omega = params.omega_sim();
    let (down, up) = noise.ladder_rates();
    let dephase = noise.dephasing_rate;
    let sq: Vec<f64> = (0..=dim).map(|n| (n as f64).sqrt()).collect();
    // truncated a a† = diag(1, 2, …, D−1, 0)
    let aad: Vec<f64> = (0..dim).map(|n| if n + 1 < dim { (n + 1) as f64 } else { 0.0 }).collect();
    let idx = |m: usize, n: usize| m + n * dim;

    // interaction picture of ω′a†a; the dissipators are invariant under it
    let rhs = |t: f64, r: &[Complex64], dr: &mut [Complex64]| {
        let k = w.coupling_unchecked(t, params) * Complex64::new(0.0, omega * t).exp();
        let kc = k.conj();
        for n in 0..dim {
            for m in 0..dim {
                // H ρ with H = k a† + k* a
                let mut hr = Complex64::default();
                if m > 0 {
                    hr += k * sq[m] * r[idx(m - 1, n)];
                }
                if m + 1 < dim {
                    hr += kc * sq[m + 1] * r[idx(m + 1, n)];
                }
                // ρ H
                let mut rh = Complex64::default();
                if n + 1 < dim {
                    rh += k * sq[n + 1] * r[idx(m, n + 1)];
                }
                if n > 0 {
                    rh += kc * sq[n] * r[idx(m, n - 1)];
                }
                let comm = hr - rh;
                let mut d = Complex64::new(comm.im, -comm.re);

                let rho = r[idx(m, n)];
                if down > 0.0 {
                    let mut jump = Complex64::default();
                    if m + 1 < dim && n + 1 < dim {
                        jump = r[idx(m + 1, n + 1)] * (sq[m + 1] * sq[n + 1]);
                    }
                    d += (jump - rho * (0.5 * (m + n) as f64)) * down;
                }
                if up > 0.0 {
                    let mut jump = Complex64::default();
                    if m > 0 && n > 0 {
                        jump = r[idx(m - 1, n - 1)] * (sq[m] * sq[n]);
                    }
                    d += (jump - rho * (0.5 * (aad[m] + aad[n]))) * up;
                }
                if dephase > 0.0 {
                    let diff = m as f64 - n as f64;
                    d -= rho * (0.5 * dephase * diff * diff);
                }
                dr[idx(m, n)] = d;
            }
        }
    };

    let mut y: Vec<Complex64> = rho0.matrix().as_slice().to_vec();
    let mut stepper = Stepper::new(opts.tolerance);
    let mut t_prev = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        stepper.advance(rhs, t_prev, t, &mut y, |_, _| Ok(()))?;
        t_prev = t;
        let mut rho = DMatrix::from_column_slice(dim, dim, &y);
        for n in 0..dim {
            for m in 0..dim {
                rho[(m, n)] *= Complex64::new(0.0, -omega * (m as f64 - n as f64) * t).exp();
            }
        }
        let top = rho[(dim - 1, dim - 1)].re;
        if dim > 1 && top > opts.truncation_threshold {
            return Err(Error::Truncation {
                t,
                dim,
                population: top,
                threshold: opts.truncation_threshold,
            });
        }
        let state = DensityState::from_matrix_unchecked(rho);
        let ev = state.min_eigenvalue();
        if ev < opts.positivity_floor {
            return Err(Error::Positivity { t, eigenvalue: ev });
        }
        let n_lab = state
            .matrix()
            .diagonal()
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.re)
            .sum();
        out.push(DensitySample {
            t,
            mean_a: state.mean_a(),
            n_lab,
            trace: state.trace(),
            state,
        });
    }
    Ok(out)
}
