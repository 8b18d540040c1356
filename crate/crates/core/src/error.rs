use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("element is not homogeneous (weights {0:?})")]
    NotHomogeneous(Vec<u32>),
    #[error("module mismatch: {0}")]
    ModuleMismatch(String),
    #[error("illegal monomial {0:?} for {1}")]
    IllegalMonomial(Vec<u32>, String),
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("incompatible windows: {0}")]
    IncompatibleWindows(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("rewriting and quotient oracle disagree: {0}")]
    Inconsistent(String),
    #[error("spectrum check failed: {0}")]
    Spectrum(String),
    #[error("instance is not interior to the window: {0}")]
    NotInterior(String),
    #[error("universal-property spot check failed: {0}")]
    SpotCheck(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl Error {
    /// Stable machine-readable code for CLI reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::NotHomogeneous(_) => "not-homogeneous",
            Error::ModuleMismatch(_) => "module-mismatch",
            Error::IllegalMonomial(..) => "illegal-monomial",
            Error::Truncation(_) => "truncation",
            Error::IncompatibleWindows(_) => "incompatible-windows",
            Error::Singular(_) => "singular",
            Error::Inconsistent(_) => "inconsistent",
            Error::Spectrum(_) => "spectrum",
            Error::NotInterior(_) => "not-interior",
            Error::SpotCheck(_) => "spot-check",
            Error::Dimension(_) => "dimension",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
