use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::experiments::{
    fit_flatness_exponent, refined_grid, run_amplitude_scaling, run_echo_with, run_instantaneous_trace,
    run_robustness_sweep, EchoOptions, TraceOptions,
};
use crate::protocols::{build, Direction, ProtocolSpec};
use crate::validate::run_validation;

use super::config::{Experiment, RunConfig};
use super::output::{
    echo_distribution_table, echo_table, emit_results, exponents_table, fmt_float, scaling_table, sweep_table,
    trace_table, trajectory_table, waveform_table, Manifest, Table,
};

/// Tables produced by one experiment, before anything touches the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<(&'static str, Table)>,
    pub findings: Vec<String>,
    /// Failed checks of the validation suite.
    pub failures: usize,
}

impl RunOutput {
    fn new(tables: Vec<(&'static str, Table)>) -> Self {
        Self {
            tables,
            findings: Vec::new(),
            failures: 0,
        }
    }
}

/// Runs `experiment` as described by `cfg`.
pub fn run_experiment(experiment: Experiment, cfg: &RunConfig) -> Result<RunOutput> {
    if let Some(declared) = cfg.experiment {
        if declared != experiment {
            return Err(Error::config(
                "experiment",
                format!("config declares `{}` but `{}` was requested", declared.name(), experiment.name()),
            ));
        }
    }
    let params = cfg.params()?;
    let noise = cfg.noise_model();
    let solver = cfg.solver_options();
    match experiment {
        Experiment::Waveform => {
            let spec = cfg.protocol_spec()?;
            let w = build(&spec, &params)?;
            Ok(RunOutput::new(vec![("waveform.csv", waveform_table(&w, cfg.waveform.points))]))
        }
        Experiment::Echo => {
            let spec = cfg.protocol_spec()?;
            let s_values = if cfg.echo.s_values.is_empty() {
                vec![spec.s]
            } else {
                cfg.echo.s_values.clone()
            };
            let opts = EchoOptions {
                forward: cfg.echo.forward,
                noise,
                solver,
            };
            let results = s_values
                .iter()
                .map(|&s| run_echo_with(&spec.with_s(s), &params, &opts))
                .collect::<Result<Vec<_>>>()?;
            Ok(RunOutput::new(vec![
                ("echo.csv", echo_table(&results)),
                ("echo_distribution.csv", echo_distribution_table(&results)),
            ]))
        }
        Experiment::Trace => {
            let spec = cfg.protocol_spec()?;
            let stops = cfg.trace_stop_times(spec.duration(&params));
            let opts = TraceOptions {
                noise,
                solver,
                faithful: cfg.trace.faithful,
            };
            let points = run_instantaneous_trace(&spec, &params, &stops, &opts)?;
            Ok(RunOutput::new(vec![
                ("trace.csv", trace_table(&points)),
                ("trajectory.csv", trajectory_table(&points)),
            ]))
        }
        Experiment::Sweep => {
            let opts = EchoOptions {
                forward: cfg.sweep.forward,
                noise,
                solver,
            };
            let sweep = run_robustness_sweep(&cfg.sweep_protocols(), &cfg.sweep_grid(), &params, &opts)?;
            let mut ordering = Table::new(&["omega_ratio", "ranking"]);
            for o in &sweep.orderings {
                ordering.push(vec![fmt_float(o.omega_ratio), o.ranking.join(" < ")]);
            }
            let mut asym = Table::new(&["protocol", "delta", "final_n_above", "final_n_below", "relative"]);
            for a in &sweep.asymmetry {
                asym.push(vec![
                    a.label.clone(),
                    fmt_float(a.delta),
                    fmt_float(a.above),
                    fmt_float(a.below),
                    fmt_float(a.relative),
                ]);
            }
            let mut out = RunOutput::new(vec![
                ("sweep.csv", sweep_table(&sweep)),
                ("sweep_ordering.csv", ordering),
                ("sweep_asymmetry.csv", asym),
            ]);
            out.findings = sweep.findings;
            Ok(out)
        }
        Experiment::Scaling => {
            let sc = &cfg.scaling;
            let amplitude = cfg
                .scaling_protocols()
                .iter()
                .map(|spec| run_amplitude_scaling(spec, &sc.s_values, &params))
                .collect::<Result<Vec<_>>>()?;
            let specs: Vec<ProtocolSpec> = sc
                .flatness_orders
                .iter()
                .map(|&n| ProtocolSpec::fourier(n, sc.flatness_s, Direction::Backward))
                .collect();
            let [lo, hi] = sc.flatness_window;
            let opts = EchoOptions {
                forward: sc.flatness_forward,
                noise,
                solver,
            };
            let grid = refined_grid(lo, hi, sc.flatness_points);
            let sweep = run_robustness_sweep(&specs, &grid, &params.at_nominal(), &opts)?;
            let flatness = specs
                .iter()
                .map(|spec| fit_flatness_exponent(&sweep, &spec.label(), (lo, hi)))
                .collect::<Result<Vec<_>>>()?;
            let mut out = RunOutput::new(vec![
                ("scaling.csv", scaling_table(&amplitude)),
                ("flatness.csv", sweep_table(&sweep)),
                ("exponents.csv", exponents_table(&amplitude, &flatness)),
            ]);
            out.findings = sweep.findings;
            Ok(out)
        }
        Experiment::Validate => {
            let checks = run_validation(&params, &solver)?;
            let mut t = Table::new(&["check", "passed", "value", "limit"]);
            for c in &checks {
                t.push(vec![c.name.to_string(), c.passed.to_string(), fmt_float(c.value), fmt_float(c.limit)]);
            }
            let mut out = RunOutput::new(vec![("validate.csv", t)]);
            out.findings = checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("check {} failed: {:e} not below {:e}", c.name, c.value, c.limit))
                .collect();
            out.failures = out.findings.len();
            Ok(out)
        }
    }
}

/// Runs `experiment`, writes its tables and manifest to `dir`, and returns
/// the output together with the written paths.
pub fn execute(experiment: Experiment, cfg: &RunConfig, dir: &Path) -> Result<(RunOutput, Vec<PathBuf>)> {
    let start = Instant::now();
    let output = run_experiment(experiment, cfg)?;
    let mut manifest = Manifest::new(experiment.name(), cfg);
    manifest.findings = output.findings.clone();
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    let paths = emit_results(&output.tables, &mut manifest, dir)?;
    Ok((output, paths))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::parse_config;

    #[test]
    fn mismatched_experiment_rejected() {
        let cfg = parse_config("experiment = \"sweep\"\n[protocol]\nkind = \"cd\"\ns = 0.4\n").unwrap();
        let err = run_experiment(Experiment::Echo, &cfg).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn echo_without_protocol_is_config_error() {
        let err = run_experiment(Experiment::Echo, &RunConfig::default()).unwrap_err();
        let Error::Config { path, .. } = err else { panic!() };
        assert_eq!(path, "protocol");
    }

    #[test]
    fn echo_tables() {
        let cfg = parse_config("[protocol]\nkind = \"cd\"\ns = 0.4\n[echo]\ns_values = [0.25, 0.35]\n").unwrap();
        let out = run_experiment(Experiment::Echo, &cfg).unwrap();
        let csv = out.tables[0].1.to_csv();
        assert!(csv.starts_with("s,final_n\n2.5000000000000000e-1,"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn waveform_and_trace_tables() {
        let cfg = parse_config("[protocol]\nkind = \"ue\"\ns = 0.5\n[waveform]\npoints = 11\n[trace]\nstops = 5\nfaithful = true\n")
            .unwrap();
        let w = run_experiment(Experiment::Waveform, &cfg).unwrap();
        assert_eq!(w.tables[0].1.header, vec!["t", "f", "f_dot", "f_ddot", "h"]);
        assert_eq!(w.tables[0].1.rows.len(), 11);
        let t = run_experiment(Experiment::Trace, &cfg).unwrap();
        assert_eq!(t.tables[0].1.header, vec!["t", "n_inst", "n_lab", "n_faithful"]);
        assert_eq!(t.tables[1].1.header, vec!["t", "re_alpha", "im_alpha", "n_lab", "n_inst"]);
    }
}
