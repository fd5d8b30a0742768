use thiserror::Error;

/// Errors raised by the numerical layers (grid, operators, integrators).
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size n = {0} is invalid: n must be even and at least 8")]
    GridSize(usize),

    #[error("field has shape {got:?}, grid expects {expected}x{expected}")]
    Shape { got: (usize, usize), expected: usize },

    #[error("non-finite sample at node (iy = {iy}, ix = {ix})")]
    NonFiniteSample { iy: usize, ix: usize },

    #[error("non-finite point coordinate ({0}, {1})")]
    NonFinitePoint(f64, f64),

    #[error("alpha must be positive, got {0}")]
    Alpha(f64),

    #[error("viscosity must be non-negative, got {0}")]
    Viscosity(f64),

    #[error("the Euler model is inviscid; got nu = {0}")]
    ViscousEuler(f64),

    #[error("Sobolev index must be {bound}, got {got}")]
    SobolevIndex { got: f64, bound: &'static str },

    #[error("velocity field is not divergence-free (|div u| up to {0:.3e})")]
    NotDivergenceFree(f64),

    #[error("inconsistent field pair: {0}")]
    Inconsistent(String),

    #[error("particle lattice needs m >= 2, got {0}")]
    LatticeSize(usize),

    #[error("time step must be positive, got {0}")]
    TimeStep(f64),

    #[error("expected {expected} stage fields, got {got}")]
    Stages { expected: usize, got: usize },

    #[error("non-finite particle state at particle {0}")]
    NonFiniteParticle(usize),

    #[error("numerical instability at t = {t} (step {step}): {detail}")]
    Instability { t: f64, step: usize, detail: String },

    #[error("invalid experiment setup: {0}")]
    Setup(String),

    #[error("config key `{key}`: {detail}")]
    Config { key: &'static str, detail: String },

    #[error("cannot parse config: {0}")]
    ConfigParse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed snapshot {path}: {detail}")]
    Snapshot { path: std::path::PathBuf, detail: String },
}

impl Error {
    /// Errors caused by the user's input (configuration or experiment set-up)
    /// rather than by a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::ConfigParse(_)
                | Error::Setup(_)
                | Error::GridSize(_)
                | Error::LatticeSize(_)
                | Error::TimeStep(_)
                | Error::Alpha(_)
                | Error::Viscosity(_)
                | Error::ViscousEuler(_)
                | Error::SobolevIndex { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
