//! CSV tables and the JSON run manifest.
//!
//! Floats are written as `{:.16e}`: 17 significant digits, enough to read
//! back the identical `f64`. Column order is fixed per table.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dynamics::{FRAME_DEFECT_LIMIT, ORACLE_TOLERANCE, TRUNCATION_THRESHOLD};
use crate::error::{Error, Result};
use crate::experiments::{EchoResult, FlatnessFit, ScalingResult, SweepResult, TracePoint};
use crate::model::PhysicalCalibration;
use crate::ode::Tolerance;
use crate::protocols::DESIGN_TOLERANCE;
use crate::waveform::DriveWaveform;

use super::config::{emit_config, RunConfig};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A header plus rows of already formatted cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
    }
}

pub fn waveform_table(w: &DriveWaveform, points: usize) -> Table {
    let mut t = Table::new(&["t", "f", "f_dot", "f_ddot", "h"]);
    for s in w.sample_grid(points) {
        t.push([s.t, s.f, s.f_dot, s.f_ddot, s.h].map(fmt_float).to_vec());
    }
    t
}

pub fn echo_table(results: &[EchoResult]) -> Table {
    let mut t = Table::new(&["s", "final_n"]);
    for r in results {
        t.push(vec![fmt_float(r.s), fmt_float(r.final_n)]);
    }
    t
}

pub fn echo_distribution_table(results: &[EchoResult]) -> Table {
    let mut t = Table::new(&["s", "n", "probability"]);
    for r in results {
        for (n, p) in r.final_distribution.iter().enumerate() {
            t.push(vec![fmt_float(r.s), n.to_string(), fmt_float(*p)]);
        }
    }
    t
}

pub fn trace_table(points: &[TracePoint]) -> Table {
    let faithful = points.iter().any(|p| p.n_faithful.is_some());
    let mut t = if faithful {
        Table::new(&["t", "n_inst", "n_lab", "n_faithful"])
    } else {
        Table::new(&["t", "n_inst", "n_lab"])
    };
    for p in points {
        let mut row = vec![fmt_float(p.t), fmt_float(p.n_inst), fmt_float(p.n_lab)];
        if faithful {
            row.push(fmt_float(p.n_faithful.unwrap_or(f64::NAN)));
        }
        t.push(row);
    }
    t
}

pub fn trajectory_table(points: &[TracePoint]) -> Table {
    let mut t = Table::new(&["t", "re_alpha", "im_alpha", "n_lab", "n_inst"]);
    for p in points {
        t.push([p.t, p.mean_a.re, p.mean_a.im, p.n_lab, p.n_inst].map(fmt_float).to_vec());
    }
    t
}

/// Failed grid points are written as `NaN`; the reason goes to the manifest.
pub fn sweep_table(sweep: &SweepResult) -> Table {
    let mut t = Table::new(&["protocol", "omega_ratio", "final_n"]);
    for e in &sweep.entries {
        t.push(vec![
            e.label.clone(),
            fmt_float(e.omega_ratio),
            fmt_float(e.final_n.unwrap_or(f64::NAN)),
        ]);
    }
    t
}

pub fn scaling_table(results: &[ScalingResult]) -> Table {
    let mut t = Table::new(&["protocol", "channel", "s", "peak"]);
    for r in results {
        let channel = serde_json::to_value(r.channel).expect("enum serialises");
        for row in &r.rows {
            t.push(vec![
                r.label.clone(),
                channel.as_str().unwrap_or_default().to_string(),
                fmt_float(row.s),
                fmt_float(row.peak),
            ]);
        }
    }
    t
}

/// One row per fitted power law: amplitude exponents against s, flatness
/// exponents against |ω′ − ω|.
pub fn exponents_table(amplitude: &[ScalingResult], flatness: &[FlatnessFit]) -> Table {
    let mut t = Table::new(&["protocol", "quantity", "exponent", "std_error", "points"]);
    for r in amplitude {
        t.push(vec![
            r.label.clone(),
            "peak_amplitude_vs_s".into(),
            fmt_float(r.exponent),
            fmt_float(r.std_error),
            r.rows.len().to_string(),
        ]);
    }
    for f in flatness {
        t.push(vec![
            f.label.clone(),
            "final_n_vs_detuning".into(),
            fmt_float(f.exponent),
            fmt_float(f.std_error),
            f.points.to_string(),
        ]);
    }
    t
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToleranceReport {
    pub closed_rtol: f64,
    pub closed_atol: f64,
    pub lindblad_rtol: f64,
    pub lindblad_atol: f64,
    pub oracle_abs: f64,
    pub truncation_threshold: f64,
    pub frame_defect_limit: f64,
    pub design_residual: f64,
}

impl ToleranceReport {
    pub fn from_config(cfg: &RunConfig) -> Self {
        let closed = Tolerance::relative(cfg.solver.tolerance);
        let lindblad = Tolerance::relative(cfg.solver.lindblad_tolerance);
        Self {
            closed_rtol: closed.rtol,
            closed_atol: closed.atol,
            lindblad_rtol: lindblad.rtol,
            lindblad_atol: lindblad.atol,
            oracle_abs: ORACLE_TOLERANCE,
            truncation_threshold: TRUNCATION_THRESHOLD,
            frame_defect_limit: FRAME_DEFECT_LIMIT,
            design_residual: DESIGN_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    /// First 12 hex digits of `config_hash`.
    pub run_id: String,
    /// SHA-256 of the resolved config with `output.dir` cleared.
    pub config_hash: String,
    pub config: RunConfig,
    pub tolerances: ToleranceReport,
    pub calibration: Option<PhysicalCalibration>,
    pub files: Vec<String>,
    pub findings: Vec<String>,
    pub wall_time_s: f64,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.output.dir = PathBuf::from(".");
    let digest = Sha256::digest(emit_config(&c).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn new(experiment: &str, cfg: &RunConfig) -> Self {
        let hash = config_hash(cfg);
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            experiment: experiment.to_string(),
            run_id: hash[..12].to_string(),
            config_hash: hash,
            config: cfg.clone(),
            tolerances: ToleranceReport::from_config(cfg),
            calibration: cfg.calibration().ok().flatten(),
            files: Vec::new(),
            findings: Vec::new(),
            wall_time_s: 0.0,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every table as `<name>` inside `dir`, then `manifest.json`
/// listing them. Returns the paths written.
pub fn emit_results(tables: &[(&str, Table)], manifest: &mut Manifest, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for (name, table) in tables {
        let path = dir.join(name);
        fs::write(&path, table.to_csv()).map_err(io_err(&path))?;
        manifest.files.push(name.to_string());
        written.push(path);
    }
    manifest.files.push("manifest.json".into());
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest).expect("manifest serialises");
    fs::write(&path, json + "\n").map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}
