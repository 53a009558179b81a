//! Numerical linear algebra on dense complex matrices.
//!
//! The matrices in this crate top out around a few hundred rows, where
//! partial-pivoting LU, Jacobi eigensolvers and an explicit-shift QR
//! iteration are simple and more than accurate enough.

pub mod blocks;
pub mod eig;
pub mod expm;
pub mod lu;
pub mod svd;

pub use eig::{eigenvalues, hermitian_eigen, schur, HermitianEigen, Schur};
pub use expm::expm;
pub use lu::Lu;
pub use svd::{null_space, singular_values, Svd};
