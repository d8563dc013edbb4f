use qshift::continuation::ContinuationError;
use qshift::exppoly::ExpPolyError;
use qshift::nevanlinna::NevanlinnaError;
use qshift::poles::PoleError;
use qshift::residual::ResidualError;
use qshift::series::SeriesError;
use qshift::solver::SolverError;
use thiserror::Error;

pub const EXIT_IO: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_FORMAL: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("refused: {0}")]
    Formal(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self::Validation(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io(_) => EXIT_IO,
            Self::Validation(_) => EXIT_VALIDATION,
            Self::Numerical(_) => EXIT_NUMERICAL,
            Self::Formal(_) => EXIT_FORMAL,
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::NonFinite(_) | SeriesError::PoleEvaluation | SeriesError::OutsideRadius { .. } => {
                Self::Numerical(e.to_string())
            }
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Overflow(_) => Self::Numerical(e.to_string()),
            SolverError::Series(s) => s.into(),
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<ContinuationError> for CliError {
    fn from(e: ContinuationError) -> Self {
        match e {
            ContinuationError::Formal => Self::Formal(e.to_string()),
            ContinuationError::Solver(s) => s.into(),
            ContinuationError::Series(s) => s.into(),
            ContinuationError::OutsideRadius { .. }
            | ContinuationError::DomainExceeded { .. }
            | ContinuationError::PoleProximity(_)
            | ContinuationError::NonFinite(_) => Self::Numerical(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<ResidualError> for CliError {
    fn from(e: ResidualError) -> Self {
        match e {
            ResidualError::Formal => Self::Formal(e.to_string()),
            ResidualError::Solver(s) => s.into(),
            ResidualError::Series(s) => s.into(),
        }
    }
}

impl From<ExpPolyError> for CliError {
    fn from(e: ExpPolyError) -> Self {
        match e {
            ExpPolyError::NonFinite => Self::Numerical(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<PoleError> for CliError {
    fn from(e: PoleError) -> Self {
        match e {
            PoleError::Overflow(_) => Self::Numerical(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<NevanlinnaError> for CliError {
    fn from(e: NevanlinnaError) -> Self {
        match e {
            NevanlinnaError::UnreliableQuadrature { .. } => Self::Numerical(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}
