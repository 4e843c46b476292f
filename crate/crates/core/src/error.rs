use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Heisenberg bound violated: det σ = {det} < 1/4")]
    HeisenbergViolation { det: f64 },

    #[error("t = {t} is outside the tabulated range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("Airy argument z = {z} is outside the supported range [{min}, {max}]")]
    AiryOutOfRange { z: f64, min: f64, max: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("quadrature did not converge; worst panel [{a}, {b}] has error estimate {error:e}")]
    Quadrature { a: f64, b: f64, error: f64 },

    #[error("no determinant asymptote: k = {k} does not exceed ω₀ = {omega0}")]
    NoAsymptote { k: f64, omega0: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
