use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// `y = 1` passed to a quantile function.
    #[error("quantile at probability 1 is unbounded")]
    UnboundedQuantile,
    #[error("{what} are coincident (zero link distance)")]
    ZeroDistance { what: &'static str },
    #[error("reflected path vanishes (||diag(f*) g|| = 0); no unique optimal reflection")]
    DegenerateReflection,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("root of {what} not bracketed after expansion")]
    RootNotBracketed { what: &'static str },
    #[error("quadrature did not converge: estimated error {achieved:e} > tolerance {tolerance:e}")]
    Integration { achieved: f64, tolerance: f64 },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("invalid experiment: {0}")]
    Experiment(String),
}

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}
