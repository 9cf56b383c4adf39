//! Self-check suite behind `sta validate`.
//!
//! Each check runs a small experiment at the design point and compares one
//! number with a fixed limit. A failing check is a result, not an error; an
//! error means the engine itself could not finish.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{
    propagate_coherent, propagate_fock, propagate_lindblad, DensityState, FockState, FrameShift, LindbladOptions,
    NoiseModel,
};
use crate::error::Result;
use crate::experiments::{
    run_amplitude_scaling, run_echo_with, run_instantaneous_trace, stop_grid, EchoOptions, Engine, SolverOptions,
    TraceOptions,
};
use crate::model::{equilibrium_displacement, CoherentAmplitude, OscillatorParams};
use crate::protocols::{build, Direction, ProtocolSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, limit: f64) -> Self {
        Self {
            name,
            value,
            limit,
            passed: value < limit,
        }
    }
}

fn backward(kind: fn(f64, Direction) -> ProtocolSpec, s: f64) -> ProtocolSpec {
    kind(s, Direction::Backward)
}

fn max_echo(specs: &[ProtocolSpec], params: &OscillatorParams, solver: &SolverOptions) -> Result<f64> {
    let opts = EchoOptions {
        solver: *solver,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    for spec in specs {
        worst = worst.max(run_echo_with(spec, params, &opts)?.final_n);
    }
    Ok(worst)
}

/// Runs every check in the nominal trap described by `params`.
pub fn run_validation(params: &OscillatorParams, solver: &SolverOptions) -> Result<Vec<Check>> {
    let p = params.at_nominal();
    let mut closed = *solver;
    if closed.engine == Engine::Lindblad || closed.engine == Engine::Auto {
        closed.engine = Engine::Fock;
    }
    let mut checks = Vec::new();

    let cd: Vec<ProtocolSpec> = (0..9)
        .map(|i| backward(ProtocolSpec::counterdiabatic, 0.15 + 0.1 * i as f64))
        .collect();
    checks.push(Check::below("cd_echo_final_n", max_echo(&cd, &p, &closed)?, 1e-8));
    let ue: Vec<ProtocolSpec> = (0..7)
        .map(|i| backward(ProtocolSpec::unitary_equivalent, 0.4 + 0.1 * i as f64))
        .collect();
    checks.push(Check::below("ue_echo_final_n", max_echo(&ue, &p, &closed)?, 1e-8));
    let fourier: Vec<ProtocolSpec> = (1..=3).map(|n| ProtocolSpec::fourier(n, 1.5, Direction::Backward)).collect();
    checks.push(Check::below("fourier_echo_final_n", max_echo(&fourier, &p, &closed)?, 1e-8));

    let spec = backward(ProtocolSpec::counterdiabatic, 0.4);
    let trace_opts = TraceOptions {
        solver: closed,
        faithful: true,
        ..Default::default()
    };
    let trace = run_instantaneous_trace(&spec, &p, &stop_grid(spec.duration(&p), 101), &trace_opts)?;
    let sup = trace.iter().map(|t| t.n_inst).fold(0.0, f64::max);
    checks.push(Check::below("cd_following_sup_n_inst", sup, 1e-8));
    let spec_ue = backward(ProtocolSpec::unitary_equivalent, 0.5);
    let trace = run_instantaneous_trace(&spec_ue, &p, &stop_grid(spec_ue.duration(&p), 21), &trace_opts)?;
    let gap = trace
        .iter()
        .map(|t| (t.n_faithful.unwrap_or(f64::NAN) - t.n_inst).abs())
        .fold(0.0, f64::max);
    checks.push(Check::below("faithful_trace_gap", gap, 1e-8));

    // Fock engine against the oracle, plus norm drift
    let w = build(&spec_ue, &p)?;
    let a0 = equilibrium_displacement(w.f_start(), &p);
    let times: Vec<f64> = (1..=20).map(|i| w.duration() * i as f64 / 20.0).collect();
    let exact = propagate_coherent(&w, &p, a0, &times)?;
    let fock = propagate_fock(&w, &p, &FockState::coherent(a0, 30), &times, &closed.fock)?;
    let dev = exact
        .iter()
        .zip(&fock)
        .map(|(e, f)| (e.alpha.alpha() - f.mean_a).norm())
        .fold(0.0, f64::max);
    checks.push(Check::below("oracle_mean_a_deviation", dev, 1e-6));
    let drift = fock.iter().map(|f| (f.norm - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check::below("norm_drift", drift, 1e-9));

    let lin = propagate_lindblad(
        &w,
        &p,
        &DensityState::pure(&FockState::coherent(a0, 30)),
        &NoiseModel::default(),
        &times,
        &LindbladOptions {
            tolerance: closed.fock.tolerance,
            ..Default::default()
        },
    )?;
    let dev = lin
        .iter()
        .zip(&fock)
        .map(|(l, f)| (l.mean_a - f.mean_a).norm())
        .fold(0.0, f64::max);
    checks.push(Check::below("lindblad_closed_limit", dev, 1e-6));
    let drift = lin.iter().map(|l| (l.trace - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check::below("lindblad_trace_drift", drift, 1e-8));

    let echo_ue = backward(ProtocolSpec::unitary_equivalent, 0.6);
    let detuned = p.with_omega_ratio(1.05)?;
    let base = run_echo_with(&echo_ue, &detuned, &EchoOptions { solver: closed, ..Default::default() })?;
    let doubled = run_echo_with(
        &echo_ue,
        &detuned,
        &EchoOptions {
            solver: closed.with_fock_dim(2 * base.fock_dim),
            ..Default::default()
        },
    )?;
    checks.push(Check::below(
        "truncation_convergence",
        (base.final_n - doubled.final_n).abs(),
        1e-8,
    ));

    let ramp = build(&ProtocolSpec::linear(1.0, Direction::Forward), &p)?;
    let end = propagate_coherent(&ramp, &p, CoherentAmplitude::VACUUM, &[ramp.duration()])?;
    checks.push(Check::below("full_period_ramp_n_inst", end[0].n_inst, 1e-10));

    let cd_scaling = run_amplitude_scaling(&spec, &[0.15, 0.25, 0.4, 0.6, 1.0, 1.5], &p)?;
    checks.push(Check::below("cd_amplitude_exponent_error", (cd_scaling.exponent + 1.0).abs(), 1e-6));
    let ue_scaling = run_amplitude_scaling(&spec_ue, &[0.15, 0.25, 0.4, 0.6, 1.0, 1.5], &p)?;
    checks.push(Check::below("ue_amplitude_exponent_error", (ue_scaling.exponent + 2.0).abs(), 1e-3));

    let psi = FockState::coherent(CoherentAmplitude::new(0.7, -0.4), 40);
    let beta = Complex64::new(-0.9, 0.3);
    let back = psi.displaced(beta)?.displaced(-beta)?;
    let err = back
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    checks.push(Check::below("frame_round_trip", err, 1e-9));

    Ok(checks)
}
