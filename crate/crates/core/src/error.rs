use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("state norm {norm} deviates from 1 by more than {tol:e}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("operator is not Hermitian (max entry deviation {max_dev:e})")]
    NotHermitian { max_dev: f64 },

    #[error("operator is not unitary (max entry deviation {max_dev:e})")]
    NotUnitary { max_dev: f64 },

    #[error("operator is not traceless (|trace| = {trace_abs:e})")]
    NotTraceless { trace_abs: f64 },

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error(
        "high-temperature expansion invalid: hbar*omega0/(kB*T) = {ratio:e} exceeds {limit:e}"
    )]
    HighTemperature { ratio: f64, limit: f64 },

    #[error("trajectory destroyed at step {step}: update norm {norm:e} is numerically zero")]
    DegenerateState { step: usize, norm: f64 },

    #[error("master-equation trace drift {drift:e} exceeds {limit:e}; reduce the step size")]
    TraceDrift { drift: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
