use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown device `{0}`")]
    UnknownDevice(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed device description: {0}")]
    DeviceFile(String),
    #[error("cells {0} and {1} have coincident dots")]
    CoincidentDots(usize, usize),
    #[error("network of {n} cells exceeds the limit of {max} for this operation")]
    TooLarge { n: usize, max: usize },
    #[error("classical ground state is degenerate ({count} configurations)")]
    DegenerateGround { count: usize },
    #[error("{what} did not converge (residual {residual:e})")]
    Convergence { what: &'static str, residual: f64 },
    #[error("step size underflow at s = {s}")]
    StepUnderflow { s: f64 },
    #[error("s = {0} outside [0, 1]")]
    OutOfDomain(f64),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
