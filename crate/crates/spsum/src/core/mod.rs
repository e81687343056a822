//! Matrix representations, materialization, triangular-tridiagonal products,
//! and the closed-form single-pair inverses used as baselines everywhere else.

pub mod dense;
pub mod error;
pub mod packed;
pub mod scalar;
pub mod single_pair;
pub mod sum;
pub mod tridiag;

pub(crate) mod dd;

pub use dense::{DenseSymmetric, Mat};
pub use error::{Error, Status};
pub use packed::PackedSymmetric;
pub use scalar::Scalar;
pub use single_pair::{sp_inverse_closed_form, sp_materialize, sp_scale, SinglePairGenerators};
pub use sum::{invert_sum_baseline, spsum_materialize, SpSum};
pub use tridiag::{ltu_product, tridiag_inverse_meurant, utl_product, SymTridiagonal, Tridiagonal};
