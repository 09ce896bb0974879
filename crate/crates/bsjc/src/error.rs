//! Error taxonomy shared by the whole crate.
//!
//! Variants are grouped by how a caller should react: configuration/usage
//! mistakes ([`Error::InvalidParameter`], [`Error::InvalidArgument`]) versus
//! genuine numerical failures ([`Error::GridCoverage`], [`Error::Truncation`],
//! [`Error::NonFinite`]). The CLI maps the former to exit code 2 and the
//! latter to exit code 3; see [`Error::exit_code`].

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter violates its documented domain
    /// (negative |alpha|, tail tolerance outside (0, 1), ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Structurally inconsistent arguments (mismatched array lengths,
    /// unsupported moment order, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The quadrature grid does not cover the state: the Husimi normalization
    /// deviates from 1 by more than the hard 1e-6 gate.
    #[error("grid coverage failure: |∫Q d²β − 1| = {deviation:.3e}; {hint}")]
    GridCoverage { deviation: f64, hint: String },

    /// The Fock-space truncation is too small for the requested state at the
    /// configured tail tolerance.
    #[error("truncation failure: {0}")]
    Truncation(String),

    /// A non-finite value (NaN/Inf) reached a result table or record.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A computed record violates a physical invariant (entropy bound,
    /// angular-integral consistency, ...) beyond numerical tolerance.
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code the CLI assigns to this error class:
    /// 2 for configuration/usage errors, 3 for numerical errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::InvalidArgument(_) => 2,
            Error::GridCoverage { .. }
            | Error::Truncation(_)
            | Error::NonFinite(_)
            | Error::Invariant(_) => 3,
        }
    }
}
