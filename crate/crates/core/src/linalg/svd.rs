use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::dense::orthonormalize_filled;
use super::{DenseBasis, SparseMatrix};
use crate::{Error, Result};

/// Parameters of the randomized subspace iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdOptions {
    /// Number of leading left singular vectors to return.
    pub rank: usize,
    /// Extra sketch columns beyond `rank`.
    pub oversampling: usize,
    /// Fixed number of power iterations before any convergence check.
    pub power_iters: usize,
    pub seed: u64,
    /// When set, iteration continues past `power_iters` until the relative
    /// residual `max_i ‖A vᵢ - σᵢ uᵢ‖ / σ₁` drops below this value.
    pub tol: Option<f64>,
    /// Bound on the total number of power iterations when `tol` is set.
    pub max_iters: usize,
}

impl SvdOptions {
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            oversampling: 10,
            power_iters: 4,
            seed: 0,
            tol: None,
            max_iters: 200,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        let limit = rows.min(cols);
        if self.rank == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()));
        }
        if self.rank > limit {
            return Err(Error::RankTooLarge { rank: self.rank, limit });
        }
        if let Some(tol) = self.tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::InvalidArgument("svd tolerance must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Leading `opts.rank` left singular vectors of a sparse matrix.
///
/// Randomized range finder followed by subspace (power) iteration on `A Aᵀ`,
/// with a Rayleigh-Ritz step on the sketch `QᵀA`. Output columns are sorted by
/// decreasing singular value; their signs are arbitrary.
pub fn truncated_svd_left(a: &SparseMatrix, opts: &SvdOptions) -> Result<DenseBasis> {
    opts.validate(a.rows(), a.cols())?;
    if a.nnz() == 0 {
        return Err(Error::InvalidArgument("matrix has no entries".into()));
    }
    let width = (opts.rank + opts.oversampling).min(a.rows().min(a.cols()));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let omega = DMatrix::from_fn(a.cols(), width, |_, _| rng.sample(StandardNormal));
    let mut q = orthonormalize_filled(&a.mul_dense(&omega)?, &mut rng);
    for _ in 0..opts.power_iters {
        q = power_step(a, &q, &mut rng)?;
    }

    let mut iterations = opts.power_iters;
    loop {
        let ritz = rayleigh_ritz(a, &q, opts.rank)?;
        let Some(tol) = opts.tol else {
            return Ok(ritz.basis);
        };
        let residual = ritz.residual(a, opts.rank)?;
        if residual <= tol {
            return Ok(ritz.basis);
        }
        if iterations >= opts.max_iters {
            return Err(Error::NoConvergence { iterations, residual });
        }
        q = power_step(a, &q, &mut rng)?;
        iterations += 1;
    }
}

fn power_step(a: &SparseMatrix, q: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>> {
    let z = a.tr_mul_dense(q)?;
    Ok(orthonormalize_filled(&a.mul_dense(&z)?, rng))
}

struct Ritz {
    basis: DenseBasis,
    /// `Aᵀ Q`, the transposed sketch.
    sketch_t: DMatrix<f64>,
    small_left: DMatrix<f64>,
    sigma: Vec<f64>,
}

fn rayleigh_ritz(a: &SparseMatrix, q: &DMatrix<f64>, rank: usize) -> Result<Ritz> {
    // B = QᵀA; with Bᵀ = Q₂R the left singular vectors of B are those of Rᵀ.
    let sketch_t = a.tr_mul_dense(q)?;
    let r = sketch_t.clone().qr().r();
    let svd = r.transpose().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .total_cmp(&svd.singular_values[i])
            .then(i.cmp(&j))
    });
    order.truncate(rank);
    let small_left = u.select_columns(&order);
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let basis = DenseBasis::orthonormal(q * &small_left);
    Ok(Ritz { basis, sketch_t, small_left, sigma })
}

impl Ritz {
    /// `max_i ‖A vᵢ - σᵢ uᵢ‖ / σ₁` over the retained nonzero singular triplets.
    fn residual(&self, a: &SparseMatrix, rank: usize) -> Result<f64> {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return Ok(0.0);
        }
        let mut worst = 0.0f64;
        for i in 0..rank.min(self.sigma.len()) {
            let s = self.sigma[i];
            if s <= 1e-14 * top {
                continue;
            }
            let v: DVector<f64> = &self.sketch_t * self.small_left.column(i) / s;
            let av = a.mul_dense(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()))?;
            let diff = av.column(0) - self.basis.matrix().column(i) * s;
            worst = worst.max(diff.norm() / top);
        }
        Ok(worst)
    }
}
