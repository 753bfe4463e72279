use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("differential operator of order zero has no expansion")]
    ZeroOrder,
    #[error("expansion contains anti-holomorphic derivatives or coefficients")]
    NotHolomorphic,
}
