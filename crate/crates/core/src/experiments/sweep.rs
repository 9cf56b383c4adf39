use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::OscillatorParams;
use crate::protocols::ProtocolSpec;

use super::{loglog_fit, run_echo_with, EchoOptions};

/// Detunings closer than this are treated as the same grid point.
const RATIO_EPS: f64 = 1e-12;

/// Largest |ω′/ω − 1| over which final_n is expected to grow monotonically.
pub const MONOTONE_WINDOW: f64 = 0.05;

/// Coarse grid 0.90, 0.92, …, 1.10 merged with [`refined_grid`] over
/// δ ∈ [1e−3, 1e−2].
pub fn default_sweep_grid() -> Vec<f64> {
    let coarse: Vec<f64> = (0..=10).map(|i| 0.90 + 0.02 * i as f64).collect();
    merge_grids(&coarse, &refined_grid(1e-3, 1e-2, 9))
}

/// `1` plus `per_side` log-spaced points on each side, `1 ± δ` with
/// δ from `lo` to `hi`.
pub fn refined_grid(lo: f64, hi: f64, per_side: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for i in 0..per_side {
        let frac = if per_side > 1 { i as f64 / (per_side - 1) as f64 } else { 0.0 };
        let delta = lo * (hi / lo).powf(frac);
        out.push(1.0 + delta);
        out.push(1.0 - delta);
    }
    merge_grids(&out, &[])
}

fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|x, y| (*x - *y).abs() < RATIO_EPS);
    all
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepEntry {
    pub protocol: ProtocolSpec,
    pub label: String,
    pub omega_ratio: f64,
    pub final_n: Option<f64>,
    /// Why this grid point has no value.
    pub error: Option<String>,
}

/// Protocols at one grid point, least excited first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridOrdering {
    pub omega_ratio: f64,
    pub ranking: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymmetryRow {
    pub label: String,
    pub delta: f64,
    /// final_n at 1 + δ
    pub above: f64,
    /// final_n at 1 − δ
    pub below: f64,
    /// |above − below| / max(above, below)
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub entries: Vec<SweepEntry>,
    pub orderings: Vec<GridOrdering>,
    pub asymmetry: Vec<AsymmetryRow>,
    /// Departures from monotone growth inside |δ| ≤ 0.05 and failed points.
    pub findings: Vec<String>,
}

impl SweepResult {
    pub fn final_n(&self, label: &str, omega_ratio: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.label == label && (e.omega_ratio - omega_ratio).abs() < RATIO_EPS)
            .and_then(|e| e.final_n)
    }

    /// `(ω′/ω, final_n)` for one protocol, in grid order, skipping failures.
    pub fn series(&self, label: &str) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .filter(|e| e.label == label)
            .filter_map(|e| e.final_n.map(|n| (e.omega_ratio, n)))
            .collect()
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.label) {
                out.push(e.label.clone());
            }
        }
        out
    }
}

/// Runs the echo for every protocol at every ω′/ω in `grid`. Grid points
/// are independent and run in parallel; a failing point is recorded and the
/// sweep goes on.
pub fn run_robustness_sweep(
    protocols: &[ProtocolSpec],
    grid: &[f64],
    params: &OscillatorParams,
    opts: &EchoOptions,
) -> Result<SweepResult> {
    if !grid.iter().any(|r| (r - 1.0).abs() < RATIO_EPS) {
        return Err(Error::InvalidParameter {
            name: "omega_ratios",
            value: f64::NAN,
            reason: "sweep grid must contain the design point 1.0",
        });
    }
    if let Some(&r) = grid.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "omega_ratios",
            value: r,
            reason: "trap-frequency ratios must be finite and positive",
        });
    }
    let grid = merge_grids(grid, &[]);
    let mut opts = *opts;
    opts.solver.engine = opts.solver.engine.resolve(&opts.noise, true)?;

    let jobs: Vec<(ProtocolSpec, f64)> = protocols
        .iter()
        .flat_map(|p| grid.iter().map(move |&r| (*p, r)))
        .collect();
    let entries: Vec<SweepEntry> = jobs
        .par_iter()
        .map(|&(protocol, ratio)| {
            let outcome = params
                .with_omega_ratio(ratio)
                .and_then(|p| run_echo_with(&protocol, &p, &opts));
            let (final_n, error) = match outcome {
                Ok(r) => (Some(r.final_n), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepEntry {
                protocol,
                label: protocol.label(),
                omega_ratio: ratio,
                final_n,
                error,
            }
        })
        .collect();

    let mut result = SweepResult {
        grid,
        entries,
        orderings: Vec::new(),
        asymmetry: Vec::new(),
        findings: Vec::new(),
    };
    result.orderings = orderings(&result);
    result.asymmetry = asymmetry(&result);
    result.findings = findings(&result);
    Ok(result)
}

fn orderings(sweep: &SweepResult) -> Vec<GridOrdering> {
    sweep
        .grid
        .iter()
        .map(|&r| {
            let mut at: Vec<(&str, f64)> = sweep
                .entries
                .iter()
                .filter(|e| (e.omega_ratio - r).abs() < RATIO_EPS)
                .filter_map(|e| e.final_n.map(|n| (e.label.as_str(), n)))
                .collect();
            at.sort_by(|a, b| a.1.total_cmp(&b.1));
            GridOrdering {
                omega_ratio: r,
                ranking: at.into_iter().map(|(l, _)| l.to_string()).collect(),
            }
        })
        .collect()
}

fn asymmetry(sweep: &SweepResult) -> Vec<AsymmetryRow> {
    let mut rows = Vec::new();
    for label in sweep.labels() {
        for (r, above) in sweep.series(&label) {
            if r <= 1.0 + RATIO_EPS {
                continue;
            }
            if let Some(below) = sweep.final_n(&label, 2.0 - r) {
                let scale = above.abs().max(below.abs());
                rows.push(AsymmetryRow {
                    label: label.clone(),
                    delta: r - 1.0,
                    above,
                    below,
                    relative: if scale > 0.0 { (above - below).abs() / scale } else { 0.0 },
                });
            }
        }
    }
    rows
}

fn findings(sweep: &SweepResult) -> Vec<String> {
    let mut out = Vec::new();
    for e in &sweep.entries {
        if let Some(err) = &e.error {
            out.push(format!("{} at omega_ratio {}: {err}", e.label, e.omega_ratio));
        }
    }
    for label in sweep.labels() {
        let series = sweep.series(&label);
        for side in [1.0, -1.0] {
            let mut pts: Vec<(f64, f64)> = series
                .iter()
                .map(|&(r, n)| ((r - 1.0) * side, n))
                .filter(|&(d, _)| d > -RATIO_EPS && d <= MONOTONE_WINDOW + RATIO_EPS)
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in pts.windows(2) {
                // ignore wiggles at the level of the integration error
                if w[1].1 < w[0].1 - 1e-14 {
                    out.push(format!(
                        "{label}: final_n drops from {:e} to {:e} between |delta| = {} and {}",
                        w[0].1, w[1].1, w[0].0, w[1].0
                    ));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatnessFit {
    pub label: String,
    /// Slope of ln final_n against ln |ω′ − ω|.
    pub exponent: f64,
    pub std_error: f64,
    pub points: usize,
    pub window: (f64, f64),
}

/// Local power law of the excitation near the design point, fitted over all
/// grid points with `window.0 ≤ |ω′/ω − 1| ≤ window.1` on either side.
pub fn fit_flatness_exponent(sweep: &SweepResult, label: &str, window: (f64, f64)) -> Result<FlatnessFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter {
            name: "window",
            value: lo,
            reason: "fit window must exclude the design point and be non-empty",
        });
    }
    let pts: Vec<(f64, f64)> = sweep
        .series(label)
        .into_iter()
        .map(|(r, n)| ((r - 1.0).abs(), n))
        .filter(|&(d, _)| d >= lo * (1.0 - 1e-9) && d <= hi * (1.0 + 1e-9))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InvalidParameter {
            name: "window",
            value: pts.len() as f64,
            reason: "flatness fit needs at least five grid points inside the window",
        });
    }
    if let Some(&(_, n)) = pts.iter().find(|(_, n)| *n <= 0.0) {
        return Err(Error::InvalidParameter {
            name: "final_n",
            value: n,
            reason: "excitation at or below the numerical floor inside the fit window; shrink the window",
        });
    }
    let (exponent, std_error) = loglog_fit(&pts)?;
    Ok(FlatnessFit {
        label: label.to_string(),
        exponent,
        std_error,
        points: pts.len(),
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ForwardLeg;
    use crate::protocols::Direction;

    #[test]
    fn default_grid_shape() {
        let g = default_sweep_grid();
        assert_eq!(g.len(), 11 + 18);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().any(|r| (r - 1.0).abs() < 1e-15));
        assert!((g[0] - 0.90).abs() < 1e-12 && (g[g.len() - 1] - 1.10).abs() < 1e-12);
    }

    #[test]
    fn grid_without_design_point_rejected() {
        let p = OscillatorParams::default();
        let spec = ProtocolSpec::counterdiabatic(1.5, Direction::Backward);
        assert!(run_robustness_sweep(&[spec], &[0.9, 1.1], &p, &EchoOptions::default()).is_err());
    }

    #[test]
    fn sweep_is_ordered_and_flat_at_design() {
        let p = OscillatorParams::default();
        let specs = [
            ProtocolSpec::counterdiabatic(1.5, Direction::Backward),
            ProtocolSpec::linear(1.5, Direction::Backward),
        ];
        let grid = [0.9, 0.95, 1.0, 1.05, 1.1];
        let sweep = run_robustness_sweep(&specs, &grid, &p, &EchoOptions::default()).unwrap();
        assert_eq!(sweep.entries.len(), 10);
        assert_eq!(sweep.entries[0].label, "cd");
        assert_eq!(sweep.entries[5].label, "linear");
        assert!(sweep.final_n("cd", 1.0).unwrap() < 1e-8);
        assert_eq!(sweep.orderings.len(), 5);
        assert_eq!(sweep.asymmetry.len(), 4);
        assert_eq!(sweep.orderings[2].ranking[0], "cd");
    }

    #[test]
    fn linear_full_period_flatness_is_quadratic() {
        let p = OscillatorParams::default();
        let spec = ProtocolSpec::linear(1.0, Direction::Backward);
        let opts = EchoOptions {
            forward: ForwardLeg::Adiabatic,
            ..Default::default()
        };
        let sweep = run_robustness_sweep(&[spec], &refined_grid(1e-3, 1e-2, 6), &p, &opts).unwrap();
        let fit = fit_flatness_exponent(&sweep, "linear", (1e-3, 1e-2)).unwrap();
        assert_eq!(fit.points, 12);
        assert!((fit.exponent - 2.0).abs() < 0.2, "{fit:?}");
    }

    #[test]
    fn fit_needs_enough_points() {
        let p = OscillatorParams::default();
        let spec = ProtocolSpec::counterdiabatic(1.5, Direction::Backward);
        let sweep = run_robustness_sweep(&[spec], &[0.99, 1.0, 1.01], &p, &EchoOptions::default()).unwrap();
        assert!(fit_flatness_exponent(&sweep, "cd", (1e-3, 1e-1)).is_err());
        assert!(fit_flatness_exponent(&sweep, "cd", (0.0, 1e-1)).is_err());
    }
}
