use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{max_abs, tol, SparseMatrix};
use crate::{Error, Result};

/// Column-major dense matrix, optionally known to have orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseBasis {
    matrix: DMatrix<f64>,
    orthonormal: bool,
}

impl DenseBasis {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix, orthonormal: false }
    }

    /// Wraps a matrix whose columns the caller guarantees to be orthonormal.
    pub fn orthonormal(matrix: DMatrix<f64>) -> Self {
        debug_assert!(orthonormality_error(&matrix) <= 1e-8);
        Self { matrix, orthonormal: true }
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// `max |QᵀQ - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.matrix)
    }
}

pub(crate) fn orthonormality_error(q: &DMatrix<f64>) -> f64 {
    let gram = q.tr_mul(q);
    let eye = DMatrix::<f64>::identity(q.ncols(), q.ncols());
    max_abs(&(gram - eye))
}

/// Orthogonalizes `v` against the first `k` columns of `q` with two passes
/// of classical Gram-Schmidt.
fn cgs2(q: &DMatrix<f64>, k: usize, v: &mut DVector<f64>) {
    if k == 0 {
        return;
    }
    let basis = q.columns(0, k);
    for _ in 0..2 {
        let coeffs = basis.tr_mul(v);
        v.gemv(-1.0, &basis, &coeffs, 1.0);
    }
}

/// Orthonormal basis of the column span of `h`.
///
/// Columns that are numerically dependent on earlier ones are dropped, so the
/// output width equals the numerical rank.
pub fn orthonormalize(h: &DenseBasis) -> Result<DenseBasis> {
    let m = h.matrix();
    if m.ncols() == 0 {
        return Err(Error::InvalidArgument("basis has no columns".into()));
    }
    let scale = m.column_iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::ZeroBasis);
    }
    let mut q = DMatrix::zeros(m.nrows(), m.ncols());
    let mut width = 0;
    for col in m.column_iter() {
        let mut v = col.clone_owned();
        cgs2(&q, width, &mut v);
        let norm = v.norm();
        if norm <= tol::RANK * scale {
            continue;
        }
        v /= norm;
        q.set_column(width, &v);
        width += 1;
    }
    Ok(DenseBasis::orthonormal(q.columns(0, width).into_owned()))
}

/// Orthonormalizes the columns of `y` in place of a QR factorization,
/// replacing dependent columns with fresh random directions so the width is
/// preserved.
pub(crate) fn orthonormalize_filled<R: Rng>(y: &DMatrix<f64>, rng: &mut R) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(y.nrows(), y.ncols());
    for (k, col) in y.column_iter().enumerate() {
        let mut v = col.clone_owned();
        let mut reference = v.norm();
        cgs2(&q, k, &mut v);
        let mut norm = v.norm();
        // dependent column: substitute a random direction
        while norm.is_nan() || norm <= 1e-8 * reference {
            v = DVector::from_fn(y.nrows(), |_, _| rng.sample(StandardNormal));
            reference = v.norm();
            cgs2(&q, k, &mut v);
            norm = v.norm();
        }
        v /= norm;
        q.set_column(k, &v);
    }
    q
}

/// Projects the columns of `h` onto the orthogonal complement of the column
/// space of `p`: `H - P (PᵀP)⁻¹ Pᵀ H`.
///
/// Empty columns of `p` are ignored. One-hot `p` has a diagonal Gram matrix
/// and is handled without a factorization.
pub fn project_out(h: &DenseBasis, p: &SparseMatrix) -> Result<DenseBasis> {
    if p.rows() != h.rows() {
        return Err(Error::DimensionMismatch {
            context: "feature matrix rows vs basis rows",
            expected: h.rows(),
            found: p.rows(),
        });
    }
    let full_gram = p.tr_mul_dense(&p.to_dense())?;
    let keep: Vec<usize> = (0..p.cols()).filter(|&j| full_gram[(j, j)] > 0.0).collect();
    if keep.is_empty() {
        return Ok(DenseBasis::new(h.matrix().clone()));
    }
    let position: Vec<Option<usize>> = {
        let mut pos = vec![None; p.cols()];
        for (k, &j) in keep.iter().enumerate() {
            pos[j] = Some(k);
        }
        pos
    };
    let reduced = SparseMatrix::from_triplets(
        p.rows(),
        keep.len(),
        p.iter()
            .filter_map(|(i, j, v)| position[j].map(|k| (i, k, v)))
            .collect(),
    )?;
    let gram = full_gram.select_rows(&keep).select_columns(&keep);
    let pt_h = reduced.tr_mul_dense(h.matrix())?;

    let is_diagonal = (0..gram.nrows())
        .all(|i| (0..gram.ncols()).all(|j| i == j || gram[(i, j)] == 0.0));
    let coeffs = if is_diagonal {
        let mut c = pt_h;
        for (i, mut row) in c.row_iter_mut().enumerate() {
            row /= gram[(i, i)];
        }
        c
    } else {
        let chol = gram.cholesky().ok_or(Error::SingularFeatureGram)?;
        let diag_min = (0..keep.len())
            .map(|i| chol.l_dirty()[(i, i)].abs())
            .fold(f64::INFINITY, f64::min);
        let diag_max = (0..keep.len())
            .map(|i| chol.l_dirty()[(i, i)].abs())
            .fold(0.0, f64::max);
        if diag_min <= 1e-7 * diag_max {
            return Err(Error::SingularFeatureGram);
        }
        chol.solve(&pt_h)
    };
    let removed = reduced.mul_dense(&coeffs)?;
    Ok(DenseBasis::new(h.matrix() - removed))
}
