use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sta_transport::io::{execute, parse_config, Experiment, RunConfig, OUTPUT_DIR_ENV};
use sta_transport::Error;

#[derive(Parser)]
#[command(name = "sta", version, about = "Shortcut-to-adiabaticity transport simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config and $STA_TRANSPORT_OUT).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Relative tolerance of the closed-system integrator.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Fixed Fock dimension instead of the automatic rule.
    #[arg(long, global = true)]
    fock_dim: Option<usize>,

    /// Replay the counterdiabatic return leg at every trace stop.
    #[arg(long, global = true)]
    faithful_trace: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Force and momentum drive of one protocol.
    Waveform,
    /// Quench echo: final phonons after forward ramp and protocol return.
    Echo,
    /// Instantaneous-frame excitation along one protocol.
    Trace,
    /// Echo against a detuned trap for several protocols.
    Sweep,
    /// Amplitude and flatness exponents.
    Scaling,
    /// Run the invariant suite.
    Validate,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Waveform => Experiment::Waveform,
            Command::Echo => Experiment::Echo,
            Command::Trace => Experiment::Trace,
            Command::Sweep => Experiment::Sweep,
            Command::Scaling => Experiment::Scaling,
            Command::Validate => Experiment::Validate,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Config { .. } | Error::InvalidParameter { .. } | Error::OutOfRange { .. } | Error::EmptyWaveform => 1,
        Error::Io { .. } => 3,
        _ => 2,
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        cfg.output.dir = dir.into();
    }
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(t) = cli.tolerance {
        cfg.solver.tolerance = t;
    }
    if let Some(d) = cli.fock_dim {
        cfg.solver.fock_dim = Some(d);
    }
    if cli.faithful_trace {
        cfg.trace.faithful = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let experiment = cli.command.experiment();
    let result = load(&cli).and_then(|cfg| {
        let dir = cfg.output.dir.clone();
        execute(experiment, &cfg, &dir)
    });
    match result {
        Ok((output, paths)) => {
            for p in &paths {
                println!("{}", p.display());
            }
            for f in &output.findings {
                eprintln!("finding: {f}");
            }
            if output.failures > 0 {
                eprintln!("{} validation check(s) failed", output.failures);
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
