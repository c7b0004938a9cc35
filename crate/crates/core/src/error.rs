//! Crate-level error and process exit codes.

use thiserror::Error;

use crate::correlations::CorrelationError;
use crate::dynamics::DynamicsError;
use crate::entanglement::EntanglementError;
use crate::lattice::ConfigError;
use crate::oracle::OracleError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid run specification: {0}")]
    InvalidSpec(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
    #[error("oracle schedule violated: {0}")]
    OracleSchedule(String),
}

impl Error {
    /// `1` invalid input, `2` numerical failure, `3` oracle schedule violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidSpec(_) | Error::Io(_) | Error::Output(_) => 1,
            Error::Dynamics(e) => match e {
                DynamicsError::Integration(_) => 2,
                _ => 1,
            },
            Error::Correlation(e) => match e {
                CorrelationError::ComplexResidue(_) => 2,
                CorrelationError::Dynamics(DynamicsError::Integration(_)) => 2,
                _ => 1,
            },
            Error::Entanglement(_) => 2,
            Error::Oracle(e) => match e {
                OracleError::Entanglement(_) => 2,
                _ => 1,
            },
            Error::OracleSchedule(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
