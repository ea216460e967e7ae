use std::fmt;

/// Errors produced by the numerical kernels and physics engines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    Parameter(String),
    /// The adaptive stepper could not meet the requested tolerance without
    /// shrinking the step below the representable minimum.
    StepSizeUnderflow { t: f64 },
    /// A quadrature sample evaluated to NaN or infinity.
    IntegrandDomain { x: f64 },
    /// A matrix failed the density-matrix test where one was required.
    NotADensityMatrix(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "parameter error: {msg}"),
            Error::StepSizeUnderflow { t } => write!(
                f,
                "stiffness/tolerance failure: step size underflow at t = {t:e}"
            ),
            Error::IntegrandDomain { x } => {
                write!(f, "integrand domain error: non-finite sample at x = {x:e}")
            }
            Error::NotADensityMatrix(msg) => write!(f, "not a density matrix: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
