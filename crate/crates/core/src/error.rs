use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("time {t} lies outside the waveform window [0, {duration}]")]
    OutOfRange { t: f64, duration: f64 },

    #[error("quadrature did not reach tolerance {requested:e} (achieved {achieved:e})")]
    Quadrature { requested: f64, achieved: f64 },

    #[error("singular waveform design system ({constraints}); smallest singular value {sigma_min:e}")]
    SingularDesign { constraints: String, sigma_min: f64 },

    #[error(
        "Fock truncation breached at t = {t}: population {population:e} in top level of D = {dim} \
         (threshold {threshold:e}); rerun with a larger Fock dimension"
    )]
    Truncation {
        t: f64,
        dim: usize,
        population: f64,
        threshold: f64,
    },

    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("density matrix lost positivity at t = {t}: eigenvalue {eigenvalue:e}")]
    Positivity { t: f64, eigenvalue: f64 },

    #[error("truncated displacement is not unitary on the occupied subspace (defect {defect:e})")]
    FrameDefect { defect: f64 },

    #[error("waveform has zero duration")]
    EmptyWaveform,

    #[error("{leg} leg: {source}")]
    Leg {
        leg: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn in_leg(self, leg: &'static str) -> Self {
        Error::Leg {
            leg,
            source: Box::new(self),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Innermost error, skipping leg annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Leg { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerical engine (truncation, positivity,
    /// step control, quadrature, design singularity).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::Quadrature { .. }
                | Error::SingularDesign { .. }
                | Error::Truncation { .. }
                | Error::StepUnderflow { .. }
                | Error::Positivity { .. }
                | Error::FrameDefect { .. }
        )
    }
}
