use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{check_times, NoiseModel};
use crate::error::Result;
use crate::model::{equilibrium_displacement, OscillatorParams};
use crate::protocols::{build, ProtocolSpec};
use crate::waveform::{DriveWaveform, Profile};

use super::{choose_dimension, oracle_peak, propagate_leg, LegState, SolverOptions};

/// Shortcut ratio of the counterdiabatic leg that carries the ion home in
/// faithful mode.
pub const RETURN_LEG_S: f64 = 0.15;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TraceOptions {
    pub noise: NoiseModel,
    pub solver: SolverOptions,
    /// Also replay the counterdiabatic return leg from every stop and report
    /// the phonons counted at zero force.
    pub faithful: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: f64,
    /// Total force-channel value at the stop.
    pub f: f64,
    pub mean_a: Complex64,
    pub n_inst: f64,
    pub n_lab: f64,
    pub n_faithful: Option<f64>,
}

/// `count` evenly spaced stop times covering `[0, duration]`.
pub fn stop_grid(duration: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![duration],
        _ => (0..count).map(|i| duration * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Runs `protocol` from the ground state of the well at its starting force
/// and reports lab-frame and instantaneous-frame phonons at each stop time.
pub fn run_instantaneous_trace(
    protocol: &ProtocolSpec,
    params: &OscillatorParams,
    stop_times: &[f64],
    opts: &TraceOptions,
) -> Result<Vec<TracePoint>> {
    let w = build(protocol, params)?;
    check_times(stop_times, w.duration())?;
    opts.noise.validate()?;
    let engine = opts.solver.engine.resolve(&opts.noise, false)?;
    let alpha0 = equilibrium_displacement(w.f_start(), params);
    let return_time = RETURN_LEG_S * params.period();
    let dim = match opts.solver.fock_dim {
        Some(d) => d,
        None => {
            let peak = oracle_peak(&[(&w, params)], alpha0)?;
            choose_dimension(peak, &opts.noise, w.duration() + return_time)
        }
    };

    let start = LegState::prepare(engine, alpha0, dim);
    let states = propagate_leg(&w, params, &start, stop_times, &opts.noise, &opts.solver)?;
    let mut out = Vec::with_capacity(states.len());
    for (&t, state) in stop_times.iter().zip(&states) {
        let f = w.force(t)?;
        let n_faithful = if opts.faithful {
            let home = DriveWaveform::transport(Profile::Linear, f, 0.0, return_time)?.with_counterdiabatic(params);
            let end = propagate_leg(&home, params, state, &[return_time], &opts.noise, &opts.solver)
                .map_err(|e| e.in_leg("return"))?;
            Some(end[0].stats(dim).mean)
        } else {
            None
        };
        out.push(TracePoint {
            t,
            f,
            mean_a: state.mean_a(),
            n_inst: state.instantaneous_n(f, params)?,
            n_lab: state.stats(dim).mean,
            n_faithful,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Engine;
    use crate::protocols::Direction;

    fn params() -> OscillatorParams {
        OscillatorParams::default()
    }

    #[test]
    fn grid_covers_window() {
        let g = stop_grid(2.0, 5);
        assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(stop_grid(2.0, 1), vec![2.0]);
    }

    #[test]
    fn cd_follows_the_minimum() {
        let p = params();
        let spec = ProtocolSpec::counterdiabatic(0.4, Direction::Backward);
        let times = stop_grid(spec.duration(&p), 21);
        let trace = run_instantaneous_trace(&spec, &p, &times, &TraceOptions::default()).unwrap();
        for pt in &trace {
            assert!(pt.n_inst < 1e-8, "t = {}: {}", pt.t, pt.n_inst);
        }
        // lab frame sees the displacement itself
        assert!((trace[0].n_lab - 1.0).abs() < 1e-8);
    }

    #[test]
    fn faithful_mode_agrees_with_frame_shift() {
        let p = params();
        let spec = ProtocolSpec::unitary_equivalent(0.5, Direction::Backward);
        let times = stop_grid(spec.duration(&p), 7);
        let opts = TraceOptions {
            faithful: true,
            ..Default::default()
        };
        for pt in run_instantaneous_trace(&spec, &p, &times, &opts).unwrap() {
            assert!((pt.n_faithful.unwrap() - pt.n_inst).abs() < 1e-8, "{pt:?}");
        }
    }

    #[test]
    fn coherent_and_fock_traces_agree() {
        let p = params();
        let spec = ProtocolSpec::unitary_equivalent(0.5, Direction::Backward);
        let times = stop_grid(spec.duration(&p), 9);
        let fock = run_instantaneous_trace(&spec, &p, &times, &TraceOptions::default()).unwrap();
        let mut opts = TraceOptions::default();
        opts.solver.engine = Engine::Coherent;
        let coh = run_instantaneous_trace(&spec, &p, &times, &opts).unwrap();
        for (a, b) in fock.iter().zip(&coh) {
            assert!((a.n_inst - b.n_inst).abs() < 1e-6);
        }
        assert!(coh.iter().any(|pt| pt.n_inst > 1e-3));
    }

    #[test]
    fn stop_outside_window_rejected() {
        let p = params();
        let spec = ProtocolSpec::counterdiabatic(0.4, Direction::Backward);
        assert!(run_instantaneous_trace(&spec, &p, &[0.5], &TraceOptions::default()).is_err());
    }
}
