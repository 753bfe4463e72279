use symbidisk_symbolic::SymbolicError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("size mismatch: rule has {expected} nodes, function has {got} values")]
    SizeMismatch { expected: usize, got: usize },
    #[error("non-integrable exponent {0} (must exceed -2)")]
    NonIntegrable(f64),
    #[error("point lies on the singular locus z1^2 = 4 z2")]
    SingularLocus,
    #[error("exponent p must exceed 1, got {0}")]
    InvalidExponent(f64),
    #[error("unsupported weight family: {0}")]
    UnsupportedFamily(String),
    #[error("seed required")]
    SeedRequired,
    #[error("invalid config: {0}")]
    Config(String),
    #[error("evaluation point {0} outside the admissible annulus 0.1 <= |w| <= 0.8")]
    EvaluationPoint(f64),
    #[error("monte carlo needs at least 1000 samples, got {0}")]
    TooFewSamples(usize),
    #[error("missing derivative of order {0}")]
    MissingDerivatives(u32),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
