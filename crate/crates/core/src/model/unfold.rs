use crate::data::InteractionTensor;
use crate::linalg::SparseMatrix;
use crate::{Error, Result};

/// Mode-`mode` matricization of a three-way tensor, 1-based mode.
///
/// Element `(i₁, i₂, i₃)` lands at row `i_mode` and column
/// `Σ_{p≠mode} i_p · J_p` (0-based), where `J_p` is the product of the
/// dimensions of the earlier non-`mode` axes. Mode 1 is therefore the
/// horizontal concatenation `[X¹ X² … Xⁿ]` and mode 2 is `[X¹ᵀ X²ᵀ … Xⁿᵀ]`.
pub fn unfold(tensor: &InteractionTensor, mode: usize) -> Result<SparseMatrix> {
    let (m1, m2, n) = tensor.dims();
    let (rows, cols) = match mode {
        1 => (m1, m2 * n),
        2 => (m2, m1 * n),
        other => return Err(Error::InvalidMode(other)),
    };
    let mut triplets = Vec::with_capacity(tensor.nnz());
    for (k, slice) in tensor.slices().iter().enumerate() {
        for (u, v, x) in slice.iter() {
            let entry = match mode {
                1 => (u, v + k * m2, x),
                _ => (v, u + k * m1, x),
            };
            triplets.push(entry);
        }
    }
    SparseMatrix::from_triplets(rows, cols, triplets)
}

/// Inverse of [`unfold`].
pub fn fold(
    matrix: &SparseMatrix,
    mode: usize,
    dims: (usize, usize, usize),
    labels: Vec<String>,
) -> Result<InteractionTensor> {
    let (m1, m2, n) = dims;
    let expected = match mode {
        1 => (m1, m2 * n),
        2 => (m2, m1 * n),
        other => return Err(Error::InvalidMode(other)),
    };
    if (matrix.rows(), matrix.cols()) != expected {
        return Err(Error::DimensionMismatch {
            context: "unfolding shape",
            expected: expected.0 * expected.1,
            found: matrix.rows() * matrix.cols(),
        });
    }
    let coords = matrix.iter().map(|(i, j, _)| match mode {
        1 => (i, j % m2, j / m2),
        _ => (j % m1, i, j / m1),
    });
    InteractionTensor::from_coords(m1, m2, labels, coords)
}
