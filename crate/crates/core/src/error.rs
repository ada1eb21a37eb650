use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WireError {
    #[error("chain length must be at least 2, got {0}")]
    ChainTooShort(usize),
    #[error("invalid chain parameter: {0}")]
    InvalidChain(String),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tridiagonal eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("invalid rate model: {0}")]
    InvalidRates(String),
    #[error("operation requires a finite on-site energy")]
    InfiniteOmega,
    #[error("integrator step size underflow: {steps} steps still above tolerance {tolerance:e}")]
    StepUnderflow { steps: usize, tolerance: f64 },
    #[error("negative population {0}")]
    NegativePopulation(f64),
    #[error("encoding requires N >= {required}, got {found}")]
    EncodingTooShort { required: usize, found: usize },
    #[error("fidelity is not monotone in the rate near gamma*tau = {0}")]
    NonMonotone(f64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, WireError>;
