//! Observable algebras of Markovian open quantum systems.
//!
//! The crate builds Lindblad generators as superoperator matrices, evolves
//! observables in the Heisenberg picture, equips the observable algebra with
//! the time-deformed product
//!
//! ```text
//! A ._t B = (Λ_t^♯)⁻¹ ( Λ_t^♯(A) · Λ_t^♯(B) )
//! ```
//!
//! and extracts the t → ∞ limit of the resulting structure constants, which
//! is in general a contraction of the original Lie algebra of observables.
//! A small classifier names the contracted algebras (abelian, Heisenberg,
//! E(2), ISO(1,1), ...), and a model registry provides the standard
//! dissipative systems (qubit dephasing, damped/phase-damped oscillators,
//! discrete-position decoherence, pure decoherence of a d-level system)
//! together with their closed-form adjoint actions used as test oracles.

pub mod cli;
pub mod contraction;
pub mod deformed;
pub mod jsonio;
pub mod linalg;
pub mod lindblad;
pub mod matrix;
pub mod models;
pub mod operator;

pub use matrix::{Complex64, Matrix};
pub use operator::{Operator, OperatorBasis};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid Lindblad specification: {0}")]
    Spec(String),

    #[error("invalid operator basis: {0}")]
    Basis(String),

    #[error("expansion residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Expansion { residual: f64, tol: f64 },

    #[error(
        "deformed commutator of basis pair ({i},{j}) leaves the basis span: \
         residual {residual:.3e} exceeds tolerance {tol:.3e}"
    )]
    Closure {
        i: usize,
        j: usize,
        residual: f64,
        tol: f64,
    },

    #[error(
        "propagator at t = {time} is too ill-conditioned to invert: \
         estimate {estimate:.3e} exceeds ceiling {max:.3e}"
    )]
    IllConditioned { time: f64, estimate: f64, max: f64 },

    #[error("bad schedule: {0}")]
    Schedule(String),

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Numerical tolerances shared across the crate.
///
/// All absolute tolerances are understood on the max-entry norm unless the
/// field name says otherwise.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Hermiticity check: ‖A − A†‖_max.
    pub herm: f64,
    /// Basis orthogonality check on Hilbert–Schmidt inner products.
    pub orth: f64,
    /// Relative reconstruction residual allowed by basis expansion.
    pub expand: f64,
    /// Relative residual allowed when a deformed commutator is expanded
    /// back in the basis (closure of the deformed bracket).
    pub closure: f64,
    /// Entrywise Cauchy tolerance for t → ∞ structure-constant limits.
    pub limit: f64,
    /// Condition-number ceiling above which propagator inversion is refused.
    pub cond_max: f64,
    /// Relative singular-value threshold for numerical null spaces.
    pub kernel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-10,
            orth: 1e-10,
            expand: 1e-10,
            closure: 1e-8,
            limit: 1e-7,
            cond_max: 1e12,
            kernel: 1e-9,
        }
    }
}
