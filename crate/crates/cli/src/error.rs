use std::path::PathBuf;

use crowlase_core::lasing::LasingError;
use crowlase_core::reservoir::ReservoirError;
use crowlase_core::spectral::SpectralError;
use crowlase_core::{CrowError, SimError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Regime(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Regime(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<LasingError> for CliError {
    fn from(e: LasingError) -> Self {
        match e {
            LasingError::BoundModeRegime { .. }
            | LasingError::OutsideBand { .. }
            | LasingError::BoundModes { .. }
            | LasingError::NoThreshold(_)
            | LasingError::InvalidInput(_) => CliError::Regime(e.to_string()),
            LasingError::Crow(e) => e.into(),
            LasingError::Spectral(e) => e.into(),
            LasingError::Reservoir(e) => e.into(),
            LasingError::NoFixedPoint => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<CrowError> for CliError {
    fn from(e: CrowError) -> Self {
        match e {
            CrowError::InvalidParameter { .. } => CliError::Config(e.to_string()),
            _ => CliError::Regime(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(_) => CliError::Config(e.to_string()),
            SimError::HorizonExceeded { .. } | SimError::Unstable { .. } | SimError::StateSizeMismatch { .. } => {
                CliError::Regime(e.to_string())
            }
            SimError::SeriesTooShort(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::BoundModes { .. } | SpectralError::NoContinuation => CliError::Regime(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<ReservoirError> for CliError {
    fn from(e: ReservoirError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
