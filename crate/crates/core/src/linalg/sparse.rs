use nalgebra::DMatrix;

use super::DenseBasis;
use crate::{Error, Result};

/// Compressed sparse row matrix with `f64` values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets in any order.
    ///
    /// Duplicate coordinates are rejected.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(r, c, _) in &triplets {
            if r >= rows {
                return Err(Error::IndexOutOfRange { what: "rows", index: r, len: rows });
            }
            if c >= cols {
                return Err(Error::IndexOutOfRange { what: "columns", index: c, len: cols });
            }
        }
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        for w in triplets.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEntry(w[0].0, w[0].1));
            }
        }
        let mut indptr = vec![0usize; rows + 1];
        for &(r, _, _) in &triplets {
            indptr[r + 1] += 1;
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        let indices = triplets.iter().map(|t| t.1).collect();
        let values = triplets.iter().map(|t| t.2).collect();
        Ok(Self { rows, cols, indptr, indices, values })
    }

    /// Binary matrix with a one at every listed coordinate.
    pub fn from_pattern(rows: usize, cols: usize, coords: &[(usize, usize)]) -> Result<Self> {
        Self::from_triplets(rows, cols, coords.iter().map(|&(r, c)| (r, c, 1.0)).collect())
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut triplets = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    triplets.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), triplets).expect("dense coordinates are unique")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    /// All entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> Self {
        let triplets = self.iter().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.cols, self.rows, triplets).expect("transpose keeps coordinates unique")
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for (&j, &v) in self.indices.iter().zip(&self.values) {
            sums[j] += v;
        }
        sums
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    /// `self · b` for a dense right-hand side.
    pub fn mul_dense(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if b.nrows() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "sparse × dense inner dimension",
                expected: self.cols,
                found: b.nrows(),
            });
        }
        let mut out = DMatrix::zeros(self.rows, b.ncols());
        for (k, col) in b.column_iter().enumerate() {
            let col = col.as_slice();
            let target = out.column_mut(k);
            let target = target.data.into_slice_mut();
            for (i, t) in target.iter_mut().enumerate() {
                let (idx, vals) = self.row(i);
                *t = idx.iter().zip(vals).map(|(&j, &v)| v * col[j]).sum();
            }
        }
        Ok(out)
    }

    /// `selfᵀ · b` without forming the transpose.
    pub fn tr_mul_dense(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if b.nrows() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "sparseᵀ × dense inner dimension",
                expected: self.rows,
                found: b.nrows(),
            });
        }
        let mut out = DMatrix::zeros(self.cols, b.ncols());
        for (k, col) in b.column_iter().enumerate() {
            let col = col.as_slice();
            let target = out.column_mut(k);
            let target = target.data.into_slice_mut();
            for (i, &x) in col.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let (idx, vals) = self.row(i);
                for (&j, &v) in idx.iter().zip(vals) {
                    target[j] += v * x;
                }
            }
        }
        Ok(out)
    }
}

/// Dense product `A · B`.
pub fn spmm(a: &SparseMatrix, b: &DenseBasis) -> Result<DenseBasis> {
    Ok(DenseBasis::new(a.mul_dense(b.matrix())?))
}

/// Dense product `Aᵀ · B`.
pub fn spmm_transposed(a: &SparseMatrix, b: &DenseBasis) -> Result<DenseBasis> {
    Ok(DenseBasis::new(a.tr_mul_dense(b.matrix())?))
}
