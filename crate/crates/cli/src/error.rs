use muskat_core::Error;

/// Failures of a run, grouped by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Gate(String),

    #[error("{0}")]
    Numeric(String),

    #[error("{0}")]
    Certification(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Gate(_) => 2,
            Self::Numeric(_) => 3,
            Self::Certification(_) => 4,
            Self::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::CertificationFailed { .. } => Self::Certification(msg),
            Error::NotConverged { .. }
            | Error::NonFinite { .. }
            | Error::StepHalving { .. }
            | Error::DegenerateDenominator { .. }
            | Error::InterfaceProximity { .. } => Self::Numeric(msg),
            Error::ConfigGate(_)
            | Error::UnknownPrimitive(_)
            | Error::InvalidParameter { .. }
            | Error::EmptyGrid
            | Error::InvalidShift(_)
            | Error::InvalidIndex { .. }
            | Error::TimeOutOfRange { .. } => Self::Gate(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Io(e.to_string())
    }
}
