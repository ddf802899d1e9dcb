use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A finite weight list was asked for an index it does not contain.
    #[error("weights exhausted: phi_{index} requested but only {available} weights were supplied")]
    WeightsExhausted { index: usize, available: usize },

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller broke a documented precondition (mismatched sizes, sums, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no Lévy tail implemented for family `{0}`")]
    NoLevyTail(String),

    /// The instance exceeds a documented size cap.
    #[error("instance too large: {0}")]
    TooLarge(String),

    /// Exact arithmetic was requested but some input is not rational.
    #[error("exact arithmetic unavailable: {0}")]
    NotExact(String),

    /// A root finder could not bracket a solution.
    #[error("no finite solution: {0}")]
    NoSolution(String),

    /// A sampler or estimator ran but its output cannot be trusted.
    #[error("diagnostic: {0}")]
    Diagnostic(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::WeightsExhausted { .. } => "weights_exhausted",
            Error::Domain(_) => "domain",
            Error::Contract(_) => "contract",
            Error::NoLevyTail(_) => "no_levy_tail",
            Error::TooLarge(_) => "too_large",
            Error::NotExact(_) => "not_exact",
            Error::NoSolution(_) => "no_solution",
            Error::Diagnostic(_) => "diagnostic",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
