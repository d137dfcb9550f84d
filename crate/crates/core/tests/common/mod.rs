//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use popsi::data::InteractionTensor;
use popsi::linalg::SparseMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-ish random orthogonal matrix from the QR of a Gaussian matrix.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    gaussian(rng, n, n).qr().q()
}

/// Leading `r` eigenvectors of `A Aᵀ`, i.e. the dominant left singular subspace,
/// together with the full descending singular value list.
pub fn dense_left_subspace(a: &DMatrix<f64>, r: usize) -> (DMatrix<f64>, Vec<f64>) {
    let gram = a * a.transpose();
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let u = DMatrix::from_fn(a.nrows(), r, |i, j| eig.eigenvectors[(i, order[j])]);
    let sigma = order.iter().map(|&i| eig.eigenvalues[i].max(0.0).sqrt()).collect();
    (u, sigma)
}

/// Sine of the largest principal angle between the column spans of two
/// orthonormal matrices of equal width.
pub fn max_principal_angle(q: &DMatrix<f64>, u: &DMatrix<f64>) -> f64 {
    let residual = u - q * (q.transpose() * u);
    residual.singular_values().max().min(1.0).asin()
}

pub fn random_binary_tensor(rng: &mut impl Rng, m1: usize, m2: usize, n: usize, density: f64) -> InteractionTensor {
    let mut coords = Vec::new();
    for k in 0..n {
        for u in 0..m1 {
            for v in 0..m2 {
                if rng.random::<f64>() < density {
                    coords.push((u, v, k));
                }
            }
        }
    }
    let labels = (0..n).map(|k| format!("b{k}")).collect();
    InteractionTensor::from_coords(m1, m2, labels, coords).unwrap()
}

/// Sparse matrix with a planted dominant rank-`r` part on sparse supports plus
/// sparse noise.
pub fn planted_sparse(rng: &mut impl Rng, m: usize, n: usize, r: usize) -> SparseMatrix {
    let mut dense = DMatrix::<f64>::zeros(m, n);
    for i in 0..r {
        let strength = 10.0 * (r - i) as f64 + 10.0;
        let rows = sample(rng, m, (m / 3).max(2));
        let cols = sample(rng, n, (n / 3).max(2));
        let x: Vec<(usize, f64)> = rows.iter().map(|j| (j, rng.sample::<f64, _>(StandardNormal))).collect();
        let y: Vec<(usize, f64)> = cols.iter().map(|j| (j, rng.sample::<f64, _>(StandardNormal))).collect();
        let scale = strength / (m as f64 * n as f64).sqrt().max(1.0) * 3.0;
        for &(a, xa) in &x {
            for &(b, yb) in &y {
                dense[(a, b)] += scale * xa * yb;
            }
        }
    }
    for _ in 0..(m * n / 20).max(1) {
        let (a, b) = (rng.random_range(0..m), rng.random_range(0..n));
        dense[(a, b)] += 0.1 * rng.sample::<f64, _>(StandardNormal);
    }
    SparseMatrix::from_dense(&dense)
}

/// Minimizer of `‖W S Hᵀ − X‖_F` over all `S`, by normal equations on the
/// Kronecker-vectorized problem `(H ⊗ W) vec(S) = vec(X)`.
pub fn least_squares_core(w: &DMatrix<f64>, x: &DMatrix<f64>, h: &DMatrix<f64>) -> DMatrix<f64> {
    let (r1, r2) = (w.ncols(), h.ncols());
    let (m1, m2) = (w.nrows(), h.nrows());
    let mut design = DMatrix::<f64>::zeros(m1 * m2, r1 * r2);
    for b in 0..r2 {
        for a in 0..r1 {
            for j in 0..m2 {
                for i in 0..m1 {
                    design[(i + j * m1, a + b * r1)] = w[(i, a)] * h[(j, b)];
                }
            }
        }
    }
    let target = DMatrix::from_column_slice(m1 * m2, 1, x.as_slice());
    let normal = design.transpose() * &design;
    let rhs = design.transpose() * target;
    let solution = normal.lu().solve(&rhs).expect("normal equations are nonsingular");
    DMatrix::from_column_slice(r1, r2, solution.as_slice())
}

/// Mid-rank (average over ties) ranks by direct counting.
pub fn brute_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn brute_spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (rx, ry) = (brute_ranks(xs), brute_ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..xs.len() {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx).powi(2);
        syy += (ry[i] - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

pub fn brute_recall(recommended: &[Vec<usize>], positives: &[Vec<usize>], k: usize) -> f64 {
    let mut total = 0.0;
    for (list, pos) in recommended.iter().zip(positives) {
        if pos.is_empty() {
            continue;
        }
        let top: std::collections::HashSet<_> = list.iter().take(k).collect();
        let hits = pos.iter().filter(|v| top.contains(v)).count();
        total += hits as f64 / pos.len() as f64;
    }
    total / positives.len() as f64
}

pub fn brute_ndcg(recommended: &[Vec<usize>], positives: &[Vec<usize>], k: usize) -> f64 {
    let gain = |rel: &[f64]| -> f64 {
        rel.iter().enumerate().map(|(i, r)| (2f64.powf(*r) - 1.0) / (i as f64 + 2.0).log2()).sum()
    };
    let mut total = 0.0;
    for (list, pos) in recommended.iter().zip(positives) {
        if pos.is_empty() {
            continue;
        }
        let rel: Vec<f64> = list.iter().take(k).map(|v| if pos.contains(v) { 1.0 } else { 0.0 }).collect();
        let ideal: Vec<f64> = vec![1.0; pos.len().min(k)];
        total += gain(&rel) / gain(&ideal);
    }
    total / positives.len() as f64
}

/// `-spearman(pop, avg_quantile)`, with quantiles from pairwise comparisons.
pub fn brute_pri(scores: &[Vec<f64>], positives: &[Vec<usize>], pop: &[u64]) -> Option<f64> {
    let items = pop.len();
    let mut sum = vec![0.0; items];
    let mut count = vec![0usize; items];
    for (s, pos) in scores.iter().zip(positives) {
        if pos.len() < 2 {
            continue;
        }
        for &i in pos {
            let ahead = pos.iter().filter(|&&j| s[j] > s[i] || (s[j] == s[i] && j < i)).count();
            sum[i] += (ahead + 1) as f64 / pos.len() as f64;
            count[i] += 1;
        }
    }
    let used: Vec<usize> = (0..items).filter(|&v| count[v] > 0).collect();
    if used.len() < 2 {
        return None;
    }
    let p: Vec<f64> = used.iter().map(|&v| pop[v] as f64).collect();
    let q: Vec<f64> = used.iter().map(|&v| sum[v] / count[v] as f64).collect();
    brute_spearman(&p, &q).map(|c| -c)
}
