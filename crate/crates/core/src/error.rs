use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution unresolvable at delta = {delta}: boundary {index} collapses onto its predecessor")]
    Unresolvable { delta: f64, index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rejection sampler exhausted {attempts} proposals for bin {bin}")]
    RetryBudget { bin: usize, attempts: u64 },

    #[error("config: {0}")]
    Config(String),

    #[error("runaway path rate {rate:.4} exceeds the 1% limit")]
    RunawayRate { rate: f64 },

    #[error("self-test failed: {0}")]
    SelfTest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::Unresolvable { .. } => "unresolvable_quantization",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::RetryBudget { .. } => "retry_budget",
            Error::Config(_) => "config",
            Error::RunawayRate { .. } => "runaway_rate",
            Error::SelfTest(_) => "selftest_failed",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
