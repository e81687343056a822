//! Factorization and semi-closed-form inversion for symmetric matrices built
//! from "single-pair" generators.
//!
//! A single-pair matrix is defined entrywise by two generator vectors,
//! `SP(a,b)[i][j] = a_min(i,j) * b_max(i,j)`; its inverse is symmetric
//! tridiagonal and known in closed form. This crate works with sums
//! `A + C` of two such matrices (`C` built from a third vector `c` against
//! all-ones), for which the inverse is computable in `O(n^2)` through a
//! chain of triangular-times-tridiagonal factorizations driven by
//! three-term continuant recursions.
//!
//! Modules:
//! - [`core`]: representations, materialization, closed-form single-pair
//!   inverses, and baseline inversion paths.
//! - [`factor`]: the factorization chain producing tridiagonal and
//!   single-pair factors from generator data, plus determinants.
//! - [`inverse`]: the quadratic-cost packed inverse of `A + C` with the
//!   reference error/warning semantics.
//! - [`gram`]: the ramp-function Gram matrix application, its specialized
//!   recursions, and exact integer continuant-polynomial coefficients.
//! - [`stability`]: empirical error studies (QR and Cramer baselines, MAE
//!   metrics, determinant family, spectrum family) with CSV emission.

pub mod core;
pub mod factor;
pub mod gram;
pub mod inverse;
pub mod stability;

pub use crate::core::error::{Error, Status};
pub use crate::core::scalar::Scalar;

/// Concrete double-precision aliases for the main domain types.
pub type SinglePairGeneratorsF64 = crate::core::single_pair::SinglePairGenerators<f64>;
pub type SpSumF64 = crate::core::sum::SpSum<f64>;
pub type SymTridiagonalF64 = crate::core::tridiag::SymTridiagonal<f64>;
pub type DenseSymmetricF64 = crate::core::dense::DenseSymmetric<f64>;
pub type PackedSymmetricF64 = crate::core::packed::PackedSymmetric<f64>;

/// Concrete single-precision aliases.
pub type SinglePairGeneratorsF32 = crate::core::single_pair::SinglePairGenerators<f32>;
pub type SpSumF32 = crate::core::sum::SpSum<f32>;
pub type SymTridiagonalF32 = crate::core::tridiag::SymTridiagonal<f32>;
pub type DenseSymmetricF32 = crate::core::dense::DenseSymmetric<f32>;
pub type PackedSymmetricF32 = crate::core::packed::PackedSymmetric<f32>;
