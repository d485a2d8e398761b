use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure categories shared by every module.
///
/// The CLI maps them onto process exit codes through [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("transition matrix is not essential: symbol {symbol} has no {missing}")]
    NotEssential { symbol: usize, missing: &'static str },

    #[error("transition matrix is reducible")]
    Reducible,

    #[error("transition matrix is not primitive (class period {period})")]
    NotPrimitive { period: usize },

    #[error("word {0:?} is not admissible")]
    NotAdmissible(Vec<u8>),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("{what} did not converge after {iterations} iterations (last residual {last_residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        last_residual: f64,
    },

    #[error("horizon too small: {0}")]
    HorizonTooSmall(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient homoclinic segment: need {required_back} backward and {required_fwd} forward iterates")]
    InsufficientSegment { required_back: usize, required_fwd: usize },

    #[error("shadowing bound violated: distance {distance:e} exceeds C*delta = {bound:e}")]
    ShadowingBound { distance: f64, bound: f64 },

    #[error("no homoclinic intersection found: {0}")]
    NoIntersection(String),

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
}

impl Error {
    /// 2 for invalid input, 3 for horizon/precondition failures, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::NotEssential { .. }
            | Error::Reducible
            | Error::NotPrimitive { .. }
            | Error::NotAdmissible(_) => 2,
            Error::HorizonTooSmall(_)
            | Error::Precondition(_)
            | Error::InsufficientSegment { .. }
            | Error::NoIntersection(_)
            | Error::CapExceeded(_) => 3,
            Error::Overflow(_) | Error::NonConvergence { .. } | Error::ShadowingBound { .. } => 4,
        }
    }
}
