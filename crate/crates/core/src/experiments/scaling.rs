use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::OscillatorParams;
use crate::protocols::{amplitude_audit, build, ProtocolKind, ProtocolSpec};

use super::loglog_fit;

/// Which peak amplitude is tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeChannel {
    /// max |f|
    Force,
    /// max |h|, the counterdiabatic drive
    Momentum,
    /// max |f̈/ω²|, the local correction of the unitarily equivalent drive
    Auxiliary,
}

impl AmplitudeChannel {
    pub fn for_kind(kind: ProtocolKind) -> Self {
        match kind {
            ProtocolKind::Counterdiabatic => AmplitudeChannel::Momentum,
            ProtocolKind::UnitaryEquivalent => AmplitudeChannel::Auxiliary,
            ProtocolKind::LinearRamp | ProtocolKind::FourierN => AmplitudeChannel::Force,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub s: f64,
    pub peak: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingResult {
    pub label: String,
    pub channel: AmplitudeChannel,
    pub rows: Vec<ScalingRow>,
    /// Fitted power of s.
    pub exponent: f64,
    pub std_error: f64,
}

/// Peak control amplitude of `template` rebuilt at every `s` in `s_grid`,
/// with a log-log fit of peak against s.
pub fn run_amplitude_scaling(
    template: &ProtocolSpec,
    s_grid: &[f64],
    params: &OscillatorParams,
) -> Result<ScalingResult> {
    if let Some(&s) = s_grid.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "s_values",
            value: s,
            reason: "shortcut ratios must be finite and positive",
        });
    }
    let channel = AmplitudeChannel::for_kind(template.kind);
    let mut rows = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let report = amplitude_audit(&build(&template.with_s(s), params)?, params)?;
        let peak = match channel {
            AmplitudeChannel::Force => report.peak_force,
            AmplitudeChannel::Momentum => report.peak_momentum,
            AmplitudeChannel::Auxiliary => report.peak_auxiliary,
        };
        rows.push(ScalingRow { s, peak });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.s, r.peak)).collect();
    let (exponent, std_error) = loglog_fit(&pts)?;
    Ok(ScalingResult {
        label: template.label(),
        channel,
        rows,
        exponent,
        std_error,
    })
}
