use thiserror::Error;

/// Errors shared across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside an operation's domain (bad exponent, wrong variables, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A quotient whose standard-monomial staircase disagrees with the
    /// expected rank, or is not even finite.
    #[error("rank error: {0}")]
    Rank(String),

    /// A configured computation limit was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Homotopy path tracking failed; carries the last Q that converged.
    #[error("path tracking failed at t={last_good_t}: {message}")]
    Path { last_good_t: f64, message: String },

    /// Two collections that must match in cardinality do not.
    #[error("structural error: {0}")]
    Structural(String),

    /// Repeated equivariant parameters (or colliding root values) where
    /// distinct ones are required.
    #[error("degeneracy: {0}")]
    Degeneracy(String),

    /// An identity that the presentations guarantee failed to reduce to zero.
    #[error("presentation mismatch: {0}")]
    PresentationMismatch(String),

    /// Invariant broken inside the library itself.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
