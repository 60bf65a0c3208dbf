use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HspError {
    #[error("modulus {0} is not a prime")]
    NotPrime(u32),
    #[error("{0} has no inverse modulo {1}")]
    ZeroInverse(u32, u32),
    #[error("group parameters do not match")]
    ParamsMismatch,
    #[error("operation requires an odd prime, got p = 2")]
    EvenCharacteristic,
    #[error("subspace is not isotropic under the symplectic form")]
    NotIsotropic,
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("high-dimensional irrep label must be nonzero")]
    ZeroLabel,
    #[error("projected state vanishes and cannot be normalized")]
    ZeroState,
    #[error("dense object of dimension {dim} exceeds cap {cap}")]
    TooLarge { dim: u64, cap: u64 },
    #[error("at least two round samples are required")]
    InsufficientSamples,
    #[error("sample budget of {0} exhausted before the span stabilized")]
    SampleBudgetExceeded(usize),
    #[error("candidate subgroup is inconsistent with the oracle")]
    VerificationFailed,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("backend cap exceeded: {0}")]
    BackendCapExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, HspError>;
