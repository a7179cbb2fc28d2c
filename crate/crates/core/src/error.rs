use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A state or operator failed one of the named validity checks.
    #[error("validation failed ({check}): {detail}")]
    Validation { check: &'static str, detail: String },

    #[error("Schmidt rank {rank} exceeds local dimension {dim}")]
    Rank { rank: usize, dim: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("size error: {0}")]
    Size(String),

    /// The ordering λ̂ ≤ λ ≤ θ ≤ ζ ≤ η ≤ P did not hold.
    #[error("coefficient chain violated: {0}")]
    Chain(String),
}
