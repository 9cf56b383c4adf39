//! Transport protocols: linear ramp, counterdiabatic pair, unitarily
//! equivalent polynomial, and Fourier-optimised waveforms.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::OscillatorParams;
use crate::quadrature;
use crate::waveform::{DriveWaveform, Profile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    #[serde(rename = "linear")]
    LinearRamp,
    #[serde(rename = "cd")]
    Counterdiabatic,
    #[serde(rename = "ue")]
    UnitaryEquivalent,
    #[serde(rename = "fourier")]
    FourierN,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// 0 → f_max
    Forward,
    /// f_max → 0
    #[default]
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    /// Shortcut ratio: duration in units of the nominal period.
    pub s: f64,
    pub direction: Direction,
    /// Number of spectral zeros at the design frequency (Fourier only).
    pub fourier_order: usize,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind, s: f64, direction: Direction) -> Self {
        Self {
            kind,
            s,
            direction,
            fourier_order: 1,
        }
    }

    pub fn linear(s: f64, direction: Direction) -> Self {
        Self::new(ProtocolKind::LinearRamp, s, direction)
    }

    pub fn counterdiabatic(s: f64, direction: Direction) -> Self {
        Self::new(ProtocolKind::Counterdiabatic, s, direction)
    }

    pub fn unitary_equivalent(s: f64, direction: Direction) -> Self {
        Self::new(ProtocolKind::UnitaryEquivalent, s, direction)
    }

    pub fn fourier(order: usize, s: f64, direction: Direction) -> Self {
        Self {
            fourier_order: order,
            ..Self::new(ProtocolKind::FourierN, s, direction)
        }
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }

    /// Short name used in tables: `linear`, `cd`, `ue`, `fourier3`, ...
    pub fn label(&self) -> String {
        match self.kind {
            ProtocolKind::LinearRamp => "linear".into(),
            ProtocolKind::Counterdiabatic => "cd".into(),
            ProtocolKind::UnitaryEquivalent => "ue".into(),
            ProtocolKind::FourierN => format!("fourier{}", self.fourier_order),
        }
    }

    pub fn duration(&self, params: &OscillatorParams) -> f64 {
        self.s * params.period()
    }

    fn validate(&self) -> Result<()> {
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(Error::InvalidParameter {
                name: "s",
                value: self.s,
                reason: "shortcut ratio must be finite and positive",
            });
        }
        if self.kind == ProtocolKind::FourierN && self.fourier_order == 0 {
            return Err(Error::InvalidParameter {
                name: "fourier_order",
                value: 0.0,
                reason: "Fourier order must be at least 1",
            });
        }
        Ok(())
    }

    fn endpoints(&self, params: &OscillatorParams) -> (f64, f64) {
        match self.direction {
            Direction::Forward => (0.0, params.f_max()),
            Direction::Backward => (params.f_max(), 0.0),
        }
    }
}

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        };
        write!(f, "{} s={} {}", self.label(), self.s, dir)
    }
}

fn expect_kind(spec: &ProtocolSpec, kind: ProtocolKind) -> Result<()> {
    if spec.kind == kind {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "kind",
            value: f64::NAN,
            reason: "builder called with a spec of another protocol kind",
        })
    }
}

fn transport(spec: &ProtocolSpec, params: &OscillatorParams, profile: Profile) -> Result<DriveWaveform> {
    spec.validate()?;
    let (f0, f1) = spec.endpoints(params);
    DriveWaveform::transport(profile, f0, f1, spec.duration(params))
}

pub fn build_linear(spec: &ProtocolSpec, params: &OscillatorParams) -> Result<DriveWaveform> {
    expect_kind(spec, ProtocolKind::LinearRamp)?;
    transport(spec, params, Profile::Linear)
}

/// Linear ramp plus the momentum drive `h = −ḟ/(mω²)`. For the backward ramp
/// this is the constant `+h_max/(2πs)`.
pub fn build_cd(spec: &ProtocolSpec, params: &OscillatorParams) -> Result<DriveWaveform> {
    expect_kind(spec, ProtocolKind::Counterdiabatic)?;
    Ok(transport(spec, params, Profile::Linear)?.with_counterdiabatic(params))
}

/// Quintic transport with the local correction `f̈/ω²` in the force channel.
pub fn build_ue(spec: &ProtocolSpec, params: &OscillatorParams) -> Result<DriveWaveform> {
    expect_kind(spec, ProtocolKind::UnitaryEquivalent)?;
    Ok(transport(spec, params, Profile::Quintic)?.with_momentum_shift(params))
}

pub fn build_fourier(spec: &ProtocolSpec, params: &OscillatorParams) -> Result<DriveWaveform> {
    expect_kind(spec, ProtocolKind::FourierN)?;
    spec.validate()?;
    let theta = params.omega_nominal() * spec.duration(params);
    let coeffs = design_fourier(theta, spec.fourier_order)?;
    transport(spec, params, Profile::FourierSine(coeffs))
}

pub fn build(spec: &ProtocolSpec, params: &OscillatorParams) -> Result<DriveWaveform> {
    match spec.kind {
        ProtocolKind::LinearRamp => build_linear(spec, params),
        ProtocolKind::Counterdiabatic => build_cd(spec, params),
        ProtocolKind::UnitaryEquivalent => build_ue(spec, params),
        ProtocolKind::FourierN => build_fourier(spec, params),
    }
}

/// Residual tolerance for the Fourier design constraints.
pub const DESIGN_TOLERANCE: f64 = 1e-10;

/// Sine coefficients `a_1..a_{N+1}` of `P(σ) = σ + Σ aₙ sin(2πnσ)`.
///
/// `theta` is the design phase `ω · duration`. The profile must satisfy
/// `P′(0) = P′(1) = 0` (one condition, since the sine series is periodic) and
/// the acceleration transform `G(ϑ) = ∫₀¹ P″(σ) e^{iϑσ} dσ` must have a zero
/// of order N at ϑ = theta, i.e. `∫₀¹ σᵏ P″ e^{iθσ} dσ = 0` for k < N.
///
/// Around the midpoint `u = σ − ½` the sine part of `P″` is odd, so each
/// moment condition has only one non-trivial real component: the sine
/// transform for even k, the cosine transform for odd k. That leaves N + 1
/// real conditions for N + 1 modes.
pub fn design_fourier(theta: f64, order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::InvalidParameter {
            name: "fourier_order",
            value: 0.0,
            reason: "Fourier order must be at least 1",
        });
    }
    let modes = order + 1;
    let mut a = DMatrix::<f64>::zeros(modes, modes);
    let mut b = DVector::<f64>::zeros(modes);
    for n in 1..=modes {
        a[(0, n - 1)] = 2.0 * PI * n as f64;
    }
    b[0] = -1.0;
    for k in 0..order {
        for n in 1..=modes {
            let w = 2.0 * PI * n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let moment = quadrature::fixed(
                |u| {
                    let trig = if k % 2 == 0 { (theta * u).sin() } else { (theta * u).cos() };
                    Complex64::new(u.powi(k as i32) * (w * u).sin() * trig, 0.0)
                },
                -0.5,
                0.5,
                32,
            );
            a[(k + 1, n - 1)] = -w * w * sign * moment.re;
        }
    }
    // scale each row by its analytic bound, so a row that vanishes
    // identically stays at round-off level instead of being blown up
    let w_top = 2.0 * PI * modes as f64;
    for r in 0..modes {
        let scale = if r == 0 { w_top } else { w_top * w_top * 0.5f64.powi(r as i32 - 1) };
        for c in 0..modes {
            a[(r, c)] /= scale;
        }
        b[r] /= scale;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let sigma_max = sv.max();
    let sigma_min = sv.min();
    if !(sigma_min > 1e-12 * sigma_max) {
        return Err(Error::SingularDesign {
            constraints: format!(
                "endpoint slope + spectral zeros of order 0..{} at design phase {theta}",
                order - 1
            ),
            sigma_min: sigma_min / sigma_max,
        });
    }
    let x = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::SingularDesign {
            constraints: "LU factorisation of the design system".into(),
            sigma_min: sigma_min / sigma_max,
        })?;
    let residual = (&a * &x - &b).amax();
    if residual > DESIGN_TOLERANCE {
        return Err(Error::SingularDesign {
            constraints: format!("design residual {residual:e} above {DESIGN_TOLERANCE:e}"),
            sigma_min: sigma_min / sigma_max,
        });
    }
    Ok(x.iter().copied().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmplitudeReport {
    /// max |f| (total force channel)
    pub peak_force: f64,
    /// max |h|
    pub peak_momentum: f64,
    /// max |f − transport profile|, the local correction of the UE protocol
    pub peak_auxiliary: f64,
    /// Peak force above `f_max` or peak momentum above `h_max`.
    pub exceeds_budget: bool,
}

pub const AUDIT_POINTS: usize = 4097;

pub fn amplitude_audit(w: &DriveWaveform, params: &OscillatorParams) -> Result<AmplitudeReport> {
    amplitude_audit_with(w, params, AUDIT_POINTS)
}

pub fn amplitude_audit_with(
    w: &DriveWaveform,
    params: &OscillatorParams,
    points: usize,
) -> Result<AmplitudeReport> {
    if points < 2 {
        return Err(Error::EmptyWaveform);
    }
    let mut report = AmplitudeReport {
        peak_force: 0.0,
        peak_momentum: 0.0,
        peak_auxiliary: 0.0,
        exceeds_budget: false,
    };
    for s in w.sample_grid(points) {
        report.peak_force = report.peak_force.max(s.f.abs());
        report.peak_momentum = report.peak_momentum.max(s.h.abs());
        report.peak_auxiliary = report.peak_auxiliary.max(s.auxiliary.abs());
    }
    let slack = 1.0 + 1e-9;
    report.exceeds_budget =
        report.peak_force > params.f_max() * slack || report.peak_momentum > params.h_max() * slack;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> OscillatorParams {
        OscillatorParams::default()
    }

    #[test]
    fn linear_ramp_values() {
        let p = params();
        let fm = p.f_max();
        let w = build_linear(&ProtocolSpec::linear(1.0, Direction::Forward), &p).unwrap();
        assert!((w.force(0.5 * p.period()).unwrap() - 0.5 * fm).abs() < 1e-12);
        assert_eq!(w.force(0.0).unwrap(), 0.0);
        assert!((w.force(p.period()).unwrap() - fm).abs() < 1e-12);
        let w = build_linear(&ProtocolSpec::linear(0.4, Direction::Backward), &p).unwrap();
        for t in [0.0, 0.1, 0.4] {
            let s = w.sample(t).unwrap();
            assert!((s.f_dot + fm / (0.4 * p.period())).abs() < 1e-12);
            assert_eq!(s.f_ddot, 0.0);
            assert_eq!(s.h, 0.0);
        }
    }

    #[test]
    fn non_positive_s_rejected() {
        let p = params();
        for s in [0.0, -1.0, f64::NAN] {
            assert!(build(&ProtocolSpec::counterdiabatic(s, Direction::Backward), &p).is_err());
            assert!(build(&ProtocolSpec::unitary_equivalent(s, Direction::Backward), &p).is_err());
            assert!(build(&ProtocolSpec::fourier(2, s, Direction::Backward), &p).is_err());
            assert!(build(&ProtocolSpec::linear(s, Direction::Backward), &p).is_err());
        }
        assert!(build(&ProtocolSpec::fourier(0, 1.5, Direction::Backward), &p).is_err());
    }

    #[test]
    fn wrong_kind_rejected() {
        let p = params();
        assert!(build_cd(&ProtocolSpec::linear(1.0, Direction::Forward), &p).is_err());
    }

    #[test]
    fn cd_momentum_amplitude() {
        let p = params();
        let h = |s: f64| {
            build_cd(&ProtocolSpec::counterdiabatic(s, Direction::Backward), &p)
                .unwrap()
                .momentum(0.0)
                .unwrap()
        };
        // backward ramp: ḟ < 0, so h = −ḟ/(mω²) = +h_max/(2πs)
        assert!((h(0.5) - p.h_max() / PI).abs() < 1e-12);
        assert!((h(0.3) - p.h_max() / (2.0 * PI * 0.3)).abs() < 1e-12);
        assert!((h(0.4) / h(0.8) - 2.0).abs() < 1e-12);
        // constant in time
        let w = build_cd(&ProtocolSpec::counterdiabatic(0.4, Direction::Backward), &p).unwrap();
        assert_eq!(w.momentum(0.0).unwrap(), w.momentum(0.3).unwrap());
    }

    #[test]
    fn static_force_has_no_cd_term() {
        let p = params();
        let w = DriveWaveform::hold(p.f_max(), 1.0).unwrap().with_counterdiabatic(&p);
        for s in w.sample_grid(17) {
            assert_eq!(s.h, 0.0);
        }
    }

    #[test]
    fn ue_boundary_conditions() {
        let p = params();
        let fm = p.f_max();
        for dir in [Direction::Forward, Direction::Backward] {
            let w = build_ue(&ProtocolSpec::unitary_equivalent(0.6, dir), &p).unwrap();
            let t1 = w.duration();
            let (a, b) = (w.sample(0.0).unwrap(), w.sample(t1).unwrap());
            assert!((a.f - w.f_start()).abs() < 1e-12);
            assert!((b.f - w.f_end()).abs() < 1e-12 * fm.max(1.0));
            assert!(a.auxiliary.abs() < 1e-12 && b.auxiliary.abs() < 1e-12 * fm);
            assert_eq!(a.h, 0.0);
        }
        // auxiliary = f̈_base/ω² in the interior
        let w = build_ue(&ProtocolSpec::unitary_equivalent(1.0, Direction::Forward), &p).unwrap();
        let t = 0.25 * w.duration();
        let expect = fm * Profile::Quintic.derivative(0.25, 2)
            / (w.duration() * p.omega_nominal()).powi(2);
        assert!((w.sample(t).unwrap().auxiliary - expect).abs() < 1e-12);
    }

    #[test]
    fn fourier_boundary_conditions() {
        let p = params();
        let fm = p.f_max();
        for n in 1..=4 {
            let w = build_fourier(&ProtocolSpec::fourier(n, 1.5, Direction::Forward), &p).unwrap();
            let t1 = w.duration();
            let (a, b) = (w.sample(0.0).unwrap(), w.sample(t1).unwrap());
            assert!(a.f.abs() < 1e-12, "{n}: f(0) = {}", a.f);
            assert!((b.f - fm).abs() < 1e-12 * fm, "{n}: f(T) = {}", b.f);
            assert!(a.f_dot.abs() < 1e-12 * fm, "{n}: f'(0) = {}", a.f_dot);
            assert!(b.f_dot.abs() < 1e-12 * fm, "{n}: f'(T) = {}", b.f_dot);
            if let Profile::FourierSine(c) = w.profile() {
                assert_eq!(c.len(), n + 1);
            }
        }
    }

    #[test]
    fn fourier_spectral_moments_vanish() {
        // independent check on [0, 1] with the un-symmetrised moments
        for order in 1..=3 {
            let theta = 2.0 * PI * 1.5;
            let c = design_fourier(theta, order).unwrap();
            let prof = Profile::FourierSine(c);
            for k in 0..order {
                let m = quadrature::fixed(
                    |x| {
                        Complex64::new(0.0, theta * x).exp()
                            * (x.powi(k as i32) * prof.derivative(x, 2))
                    },
                    0.0,
                    1.0,
                    64,
                );
                assert!(m.norm() < 1e-10, "order {order} moment {k}: {m}");
            }
        }
    }

    #[test]
    fn fourier_order3_is_oscillatory() {
        let p = params();
        let fm = p.f_max();
        let w = build_fourier(&ProtocolSpec::fourier(3, 1.5, Direction::Forward), &p).unwrap();
        let grid = w.sample_grid(2001);
        let lo = grid.iter().map(|s| s.f).fold(f64::INFINITY, f64::min);
        let hi = grid.iter().map(|s| s.f).fold(f64::NEG_INFINITY, f64::max);
        assert!(lo < -1e-3 * fm || hi > fm * (1.0 + 1e-3), "range [{lo}, {hi}]");
        let sign_changes = grid
            .windows(2)
            .filter(|w| w[0].f_dot.signum() != w[1].f_dot.signum())
            .count();
        assert!(sign_changes >= 2);
    }

    #[test]
    fn integer_ratio_design_is_singular() {
        // at θ = 6π the zeroth moment is orthogonal to both available modes
        match design_fourier(2.0 * PI * 3.0, 1) {
            Err(Error::SingularDesign { .. }) => {}
            other => panic!("expected singular design, got {other:?}"),
        }
    }

    #[test]
    fn audit_linear_and_scaling() {
        let p = params();
        let w = build_linear(&ProtocolSpec::linear(1.0, Direction::Forward), &p).unwrap();
        let r = amplitude_audit(&w, &p).unwrap();
        assert!((r.peak_force - p.f_max()).abs() < 1e-12);
        assert_eq!(r.peak_momentum, 0.0);
        assert!(!r.exceeds_budget);

        let cd = |s| {
            let w = build_cd(&ProtocolSpec::counterdiabatic(s, Direction::Backward), &p).unwrap();
            amplitude_audit(&w, &p).unwrap().peak_momentum
        };
        assert!((cd(0.3) / cd(0.6) - 2.0).abs() < 1e-9);

        let ue = |s| {
            let w = build_ue(&ProtocolSpec::unitary_equivalent(s, Direction::Backward), &p).unwrap();
            amplitude_audit(&w, &p).unwrap().peak_auxiliary
        };
        assert!((ue(0.3) / ue(0.6) - 4.0).abs() < 1e-6);

        let w = build_ue(&ProtocolSpec::unitary_equivalent(0.1, Direction::Backward), &p).unwrap();
        assert!(amplitude_audit(&w, &p).unwrap().exceeds_budget);
        assert!(amplitude_audit_with(&w, &p, 0).is_err());
    }
}
