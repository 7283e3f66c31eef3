//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by operator construction, meshing, physics evaluation and
/// time integration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported triangle quadrature degree {degree} (supported: 1..={max})")]
    UnsupportedDegree { degree: usize, max: usize },

    #[error("ill-conditioned basis: cond(M) = {0:.3e} exceeds 1e8")]
    IllConditionedBasis(f64),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("nonconforming mesh: {0}")]
    NonconformingMesh(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// An inadmissible state (negative density or internal energy) was
    /// produced during a run. Carries enough context to locate the failure.
    #[error("solution blow-up at t = {t:.6e}: element {element}, point {point}: rho = {rho:.6e}, rho_e = {rho_e:.6e}")]
    BlowUp {
        t: f64,
        element: usize,
        point: usize,
        rho: f64,
        rho_e: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("plot error: {0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI. Success is 0; each failure class gets
    /// a distinct code so scripts can tell them apart.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::UnsupportedDegree { .. } => 2,
            Error::BlowUp { .. } => 3,
            Error::OracleFailure(_) => 4,
            Error::Plot(_) => 5,
            _ => 1,
        }
    }
}
