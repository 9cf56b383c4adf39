//! TOML run configuration.
//!
//! Every section is optional and every key has a default except
//! `protocol.kind` and `protocol.s`. Unknown keys are rejected, and every
//! error names the offending path.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dynamics::NoiseModel;
use crate::error::{Error, Result};
use crate::experiments::{default_sweep_grid, Engine, ForwardLeg, SolverOptions};
use crate::model::{OscillatorParams, PhysicalCalibration};
use crate::ode::Tolerance;
use crate::protocols::{Direction, ProtocolKind, ProtocolSpec};

/// Environment variable that overrides `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "STA_TRANSPORT_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Waveform,
    Echo,
    Trace,
    Sweep,
    Scaling,
    Validate,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Waveform => "waveform",
            Experiment::Echo => "echo",
            Experiment::Trace => "trace",
            Experiment::Sweep => "sweep",
            Experiment::Scaling => "scaling",
            Experiment::Validate => "validate",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; when present it must match the subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    /// Reserved. The engine is deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub oscillator: OscillatorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub waveform: WaveformConfig,
    #[serde(default)]
    pub echo: EchoConfig,
    #[serde(default)]
    pub trace: TraceConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillatorConfig {
    /// Nominal angular frequency in dimensionless units (2π: time in periods).
    pub omega: f64,
    /// Simulated trap as a multiple of the nominal one.
    pub omega_ratio: f64,
    /// Largest force-channel coupling in units of ω.
    pub g_max: f64,
    pub mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap_khz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period_us: Option<f64>,
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        Self {
            omega: 2.0 * PI,
            omega_ratio: 1.0,
            g_max: 1.0,
            mass: 1.0,
            trap_khz: None,
            period_us: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    pub s: f64,
    #[serde(default)]
    pub direction: Direction,
    /// Fourier order N.
    #[serde(default = "one")]
    pub order: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    /// Quanta per unit time.
    pub heating_rate: f64,
    /// Bath occupation; omitted means the pure-heating limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermal_nbar: Option<f64>,
    pub dephasing_rate: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            heating_rate: 0.0,
            thermal_nbar: None,
            dephasing_rate: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveformConfig {
    pub points: usize,
}

impl Default for WaveformConfig {
    fn default() -> Self {
        Self { points: 1001 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EchoConfig {
    /// Shortcut ratios to run; empty means just `protocol.s`.
    pub s_values: Vec<f64>,
    pub forward: ForwardLeg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceConfig {
    /// Number of evenly spaced stops, used when `stop_times` is empty.
    pub stops: usize,
    pub stop_times: Vec<f64>,
    pub faithful: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            stops: 101,
            stop_times: Vec::new(),
            faithful: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Protocol labels: `linear`, `cd`, `ue`, `fourierN`.
    pub protocols: Vec<String>,
    pub s: f64,
    /// Empty means the default grid.
    pub omega_ratios: Vec<f64>,
    pub forward: ForwardLeg,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            protocols: ["cd", "ue", "fourier1", "linear"].map(String::from).to_vec(),
            s: 1.5,
            omega_ratios: Vec::new(),
            forward: ForwardLeg::Simulated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub protocols: Vec<String>,
    pub s_values: Vec<f64>,
    pub flatness_orders: Vec<usize>,
    pub flatness_s: f64,
    /// `[lo, hi]` range of |ω′/ω − 1| for the flatness fit.
    pub flatness_window: [f64; 2],
    pub flatness_points: usize,
    pub flatness_forward: ForwardLeg,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            protocols: ["cd", "ue", "linear"].map(String::from).to_vec(),
            s_values: vec![0.15, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0, 1.5],
            flatness_orders: vec![1, 2, 3],
            flatness_s: 1.5,
            flatness_window: [1e-3, 1e-2],
            flatness_points: 9,
            flatness_forward: ForwardLeg::Adiabatic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub engine: Engine,
    /// Relative tolerance of the closed-system integrator.
    pub tolerance: f64,
    pub lindblad_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock_dim: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            engine: Engine::Auto,
            tolerance: Tolerance::CLOSED.rtol,
            lindblad_tolerance: Tolerance::LINDBLAD.rtol,
            fock_dim: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Parses and validates a TOML document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = toml::Deserializer::new(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.message().to_string();
        Error::config(if path == "." { String::new() } else { path }, message)
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Serialises a config; `parse_config(&emit_config(c)) == c` for valid `c`.
pub fn emit_config(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("config types always serialise")
}

fn check(ok: bool, path: impl Into<String>, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(path, message))
    }
}

fn positive(v: f64, path: impl Into<String>) -> Result<()> {
    check(v.is_finite() && v > 0.0, path, "must be finite and positive")
}

fn non_negative(v: f64, path: impl Into<String>) -> Result<()> {
    check(v.is_finite() && v >= 0.0, path, "must be finite and non-negative")
}

/// `linear`, `cd`, `ue` or `fourierN`.
pub fn parse_protocol_label(label: &str, s: f64, direction: Direction) -> Option<ProtocolSpec> {
    match label {
        "linear" => Some(ProtocolSpec::linear(s, direction)),
        "cd" => Some(ProtocolSpec::counterdiabatic(s, direction)),
        "ue" => Some(ProtocolSpec::unitary_equivalent(s, direction)),
        _ => {
            let order: usize = label.strip_prefix("fourier")?.parse().ok()?;
            (order >= 1).then(|| ProtocolSpec::fourier(order, s, direction))
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let o = &self.oscillator;
        positive(o.omega, "oscillator.omega")?;
        positive(o.omega_ratio, "oscillator.omega_ratio")?;
        positive(o.g_max, "oscillator.g_max")?;
        positive(o.mass, "oscillator.mass")?;
        if let Some(k) = o.trap_khz {
            positive(k, "oscillator.trap_khz")?;
        }
        if let Some(p) = o.period_us {
            positive(p, "oscillator.period_us")?;
        }
        PhysicalCalibration::resolve(o.trap_khz, o.period_us)
            .map_err(|e| Error::config("oscillator.period_us", e.to_string()))?;

        if let Some(p) = &self.protocol {
            positive(p.s, "protocol.s")?;
            check(p.order >= 1, "protocol.order", "Fourier order must be at least 1")?;
        }

        let n = &self.noise;
        non_negative(n.heating_rate, "noise.heating_rate")?;
        non_negative(n.dephasing_rate, "noise.dephasing_rate")?;
        if let Some(nbar) = n.thermal_nbar {
            positive(nbar, "noise.thermal_nbar")?;
        }

        check(self.waveform.points >= 2, "waveform.points", "need at least two points")?;
        for (i, s) in self.echo.s_values.iter().enumerate() {
            positive(*s, format!("echo.s_values[{i}]"))?;
        }

        check(
            self.trace.stops >= 1 || !self.trace.stop_times.is_empty(),
            "trace.stops",
            "need at least one stop",
        )?;
        let mut prev = 0.0;
        for (i, t) in self.trace.stop_times.iter().enumerate() {
            let path = format!("trace.stop_times[{i}]");
            non_negative(*t, path.clone())?;
            check(*t >= prev, path.clone(), "stop times must be non-decreasing")?;
            if let Some(p) = &self.protocol {
                let duration = p.s * 2.0 * PI / o.omega;
                check(*t <= duration * (1.0 + 1e-12), path, "stop time beyond the protocol duration")?;
            }
            prev = *t;
        }

        for (i, label) in self.sweep.protocols.iter().enumerate() {
            check(
                parse_protocol_label(label, 1.0, Direction::Backward).is_some(),
                format!("sweep.protocols[{i}]"),
                "unknown protocol (expected linear, cd, ue or fourierN)",
            )?;
        }
        positive(self.sweep.s, "sweep.s")?;
        for (i, r) in self.sweep.omega_ratios.iter().enumerate() {
            positive(*r, format!("sweep.omega_ratios[{i}]"))?;
        }
        if !self.sweep.omega_ratios.is_empty() {
            check(
                self.sweep.omega_ratios.iter().any(|r| (r - 1.0).abs() < 1e-12),
                "sweep.omega_ratios",
                "grid must contain the design point 1.0",
            )?;
        }

        let sc = &self.scaling;
        for (i, label) in sc.protocols.iter().enumerate() {
            check(
                parse_protocol_label(label, 1.0, Direction::Backward).is_some(),
                format!("scaling.protocols[{i}]"),
                "unknown protocol (expected linear, cd, ue or fourierN)",
            )?;
        }
        check(sc.s_values.len() >= 3, "scaling.s_values", "need at least three ratios")?;
        for (i, s) in sc.s_values.iter().enumerate() {
            positive(*s, format!("scaling.s_values[{i}]"))?;
        }
        for (i, n) in sc.flatness_orders.iter().enumerate() {
            check(*n >= 1, format!("scaling.flatness_orders[{i}]"), "Fourier order must be at least 1")?;
        }
        positive(sc.flatness_s, "scaling.flatness_s")?;
        let [lo, hi] = sc.flatness_window;
        check(
            lo > 0.0 && hi > lo && hi < 1.0,
            "scaling.flatness_window",
            "need 0 < lo < hi < 1",
        )?;
        check(sc.flatness_points >= 3, "scaling.flatness_points", "need at least three points per side")?;

        let so = &self.solver;
        check(
            so.tolerance > 0.0 && so.tolerance <= 1e-3,
            "solver.tolerance",
            "must lie in (0, 1e-3]",
        )?;
        check(
            so.lindblad_tolerance > 0.0 && so.lindblad_tolerance <= 1e-3,
            "solver.lindblad_tolerance",
            "must lie in (0, 1e-3]",
        )?;
        if let Some(d) = so.fock_dim {
            check(d >= 2, "solver.fock_dim", "need at least two levels")?;
        }
        check(
            !self.output.dir.as_os_str().is_empty(),
            "output.dir",
            "must not be empty",
        )?;
        Ok(())
    }

    pub fn params(&self) -> Result<OscillatorParams> {
        let o = &self.oscillator;
        OscillatorParams::new(o.omega, o.g_max, o.mass)?.with_omega_ratio(o.omega_ratio)
    }

    pub fn calibration(&self) -> Result<Option<PhysicalCalibration>> {
        PhysicalCalibration::resolve(self.oscillator.trap_khz, self.oscillator.period_us)
    }

    pub fn noise_model(&self) -> NoiseModel {
        NoiseModel {
            heating_rate: self.noise.heating_rate,
            thermal_nbar: self.noise.thermal_nbar.unwrap_or(f64::INFINITY),
            dephasing_rate: self.noise.dephasing_rate,
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let mut opts = SolverOptions {
            engine: self.solver.engine,
            fock_dim: self.solver.fock_dim,
            ..Default::default()
        };
        opts.fock.tolerance = Tolerance::relative(self.solver.tolerance);
        opts.lindblad.tolerance = Tolerance::relative(self.solver.lindblad_tolerance);
        opts
    }

    /// The `[protocol]` section, required by single-protocol experiments.
    pub fn protocol_spec(&self) -> Result<ProtocolSpec> {
        let p = self
            .protocol
            .as_ref()
            .ok_or_else(|| Error::config("protocol", "missing section (need at least kind and s)"))?;
        let mut spec = ProtocolSpec::new(p.kind, p.s, p.direction);
        spec.fourier_order = p.order;
        Ok(spec)
    }

    pub fn sweep_protocols(&self) -> Vec<ProtocolSpec> {
        labels_to_specs(&self.sweep.protocols, self.sweep.s)
    }

    pub fn sweep_grid(&self) -> Vec<f64> {
        if self.sweep.omega_ratios.is_empty() {
            default_sweep_grid()
        } else {
            self.sweep.omega_ratios.clone()
        }
    }

    pub fn scaling_protocols(&self) -> Vec<ProtocolSpec> {
        labels_to_specs(&self.scaling.protocols, 1.0)
    }

    pub fn trace_stop_times(&self, duration: f64) -> Vec<f64> {
        if self.trace.stop_times.is_empty() {
            crate::experiments::stop_grid(duration, self.trace.stops)
        } else {
            self.trace.stop_times.clone()
        }
    }
}

fn labels_to_specs(labels: &[String], s: f64) -> Vec<ProtocolSpec> {
    labels
        .iter()
        .filter_map(|l| parse_protocol_label(l, s, Direction::Backward))
        .collect()
}
