use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure classes surfaced by the library. Each maps to a distinct process
/// exit code in the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("admissibility violated: {0}")]
    Admissibility(String),

    #[error("degenerate shock: {0}")]
    DegenerateShock(String),

    #[error("end states are not connected by a 1-shock and a 2-shock: {0}")]
    NotDoubleShock(String),

    #[error("vacuum: {0}")]
    Vacuum(String),

    #[error("profile integration did not close: {0}")]
    ProfileDivergence(String),

    #[error("solver blew up at step {step}: {reason}")]
    SolverBlowup { step: u64, reason: String },

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Admissibility(_) | Error::DegenerateShock(_) | Error::NotDoubleShock(_) => 3,
            Error::Vacuum(_) => 4,
            Error::SolverBlowup { .. } => 5,
            Error::DomainTooSmall(_) => 6,
            Error::ProfileDivergence(_) => 7,
            Error::Domain(_) => 8,
            Error::Io(_) => 9,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
