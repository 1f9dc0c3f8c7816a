use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the zero polynomial has no zero strip")]
    EmptyPolynomial,

    #[error("single-term exponential polynomial has no zeros")]
    ZeroFree,

    #[error("{what} exceeds capacity {cap}")]
    Capacity { what: &'static str, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("|p| on the rectangle boundary too small ({min_modulus:.3e} < {threshold:.3e}) after {attempts} attempts")]
    BoundaryProximity { min_modulus: f64, threshold: f64, attempts: usize },

    #[error("winding number {winding} is not close to an integer")]
    QuadratureFailure { winding: f64 },

    #[error("quadrature did not converge (achieved error {achieved:.3e})")]
    NoConvergence { achieved: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zeros are not real (max |Im| = {max_imag:.3e})")]
    NotReal { max_imag: f64 },

    #[error("no arithmetic progression covers at least {min_points} points")]
    DecompositionFailure { min_points: usize },

    #[error("not a sine product: {0}")]
    NotSineProduct(String),

    #[error("{stage} stage: {source}")]
    Stage { stage: &'static str, source: Box<Error> },
}

impl Error {
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// Innermost error, with stage tags removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}
