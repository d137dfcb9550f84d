//! Sparse kernels and subspace routines.

mod dense;
mod sparse;
mod svd;

pub use dense::{orthonormalize, project_out, DenseBasis};
pub use sparse::{spmm, spmm_transposed, SparseMatrix};
pub use svd::{truncated_svd_left, SvdOptions};

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Bound on `max |QᵀQ - I|` for bases flagged orthonormal.
    pub const ORTHONORMAL: f64 = 1e-10;
    /// Bound on the largest principal angle against a reference subspace.
    pub const SUBSPACE: f64 = 1e-8;
    /// Columns whose residual after orthogonalization falls below this
    /// fraction of the largest input column norm are treated as dependent.
    pub const RANK: f64 = 1e-10;
}

pub(crate) fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}
