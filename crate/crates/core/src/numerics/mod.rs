//! Dense complex linear algebra for small dimensions.

mod decomp;
mod eig;
mod matrix;
pub mod random;

pub(crate) use decomp::check_index_set;
pub use decomp::{
    determinant, minor_determinant, null_space, orthonormalize_columns, qr, row_space, NullSpace,
};
pub use eig::{
    hermitian_eig, hermitian_eig_with_tol, hermitian_function, EigenDecomposition, MAX_SWEEPS,
};
pub use matrix::{inner, vec_norm, CMatrix, C64, ONE, ZERO};
pub use random::haar_unitary;
