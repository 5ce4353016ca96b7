use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shell empty: no lattice point in the shell annulus ({inner} < |p| <= {outer}); N too small for the chosen epsilon")]
    ShellEmpty { inner: f64, outer: f64 },
    #[error("solver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },
    #[error("regime violated: {0}")]
    Regime(String),
    #[error("not dilute: rho*a^3 = {0:e} >= 1")]
    NotDilute(f64),
    #[error("truncation: {0}")]
    Truncation(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("mode error: {0}")]
    Mode(String),
    #[error("numerical: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
