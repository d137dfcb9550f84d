use super::{unfold, PopularityFeatures};
use crate::data::InteractionTensor;
use crate::linalg::{max_abs, orthonormalize, project_out, tol, truncated_svd_left, DenseBasis, SvdOptions};
use crate::seed::{derive, stream};
use crate::{Error, Result};

/// Orthonormal user and item feature bases.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpaces {
    /// `m₁ × r`.
    pub user: DenseBasis,
    /// `m₂ × r'`, with `r' ≤ r` once debiased.
    pub item: DenseBasis,
    /// Requested slice rank `r`.
    pub rank: usize,
    pub debiased: bool,
}

/// Leading left singular subspaces of the mode-1 and mode-2 unfoldings.
///
/// `svd.rank` is overridden by `rank`; the user and item solves draw
/// independent seeds derived from `svd.seed`.
pub fn estimate_subspaces(train: &InteractionTensor, rank: usize, svd: &SvdOptions) -> Result<FeatureSpaces> {
    let user = estimate_user_space(train, rank, svd)?;
    let item = estimate_item_space(train, rank, svd)?;
    Ok(FeatureSpaces { user, item, rank, debiased: false })
}

pub(crate) fn estimate_user_space(train: &InteractionTensor, rank: usize, svd: &SvdOptions) -> Result<DenseBasis> {
    let x1 = unfold(train, 1)?;
    let opts = SvdOptions { rank, seed: derive(svd.seed, stream::SVD_USER), ..svd.clone() };
    truncated_svd_left(&x1, &opts)
}

pub(crate) fn estimate_item_space(train: &InteractionTensor, rank: usize, svd: &SvdOptions) -> Result<DenseBasis> {
    let x2 = unfold(train, 2)?;
    let opts = SvdOptions { rank, seed: derive(svd.seed, stream::SVD_ITEM), ..svd.clone() };
    truncated_svd_left(&x2, &opts)
}

/// Removes the popularity directions from the item basis and restores an
/// orthonormal basis of what remains.
pub fn debias_item_space(spaces: &FeatureSpaces, features: &PopularityFeatures) -> Result<FeatureSpaces> {
    let projected = project_item_space(&spaces.item, features)?;
    let item = reorthonormalize_item_space(&projected, features)?;
    Ok(FeatureSpaces {
        user: spaces.user.clone(),
        item,
        rank: spaces.rank,
        debiased: true,
    })
}

pub(crate) fn project_item_space(item: &DenseBasis, features: &PopularityFeatures) -> Result<DenseBasis> {
    let projected = project_out(item, features.matrix())?;
    let largest = projected.matrix().column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    if largest <= tol::ORTHONORMAL {
        return Err(Error::ZeroBasis);
    }
    Ok(projected)
}

pub(crate) fn reorthonormalize_item_space(projected: &DenseBasis, features: &PopularityFeatures) -> Result<DenseBasis> {
    let p = features.matrix();
    let mut item = orthonormalize(projected)?;
    // A nearly annihilated column keeps an amplified trace of range(P);
    // one more projection pass clears it.
    if max_abs(&p.tr_mul_dense(item.matrix())?) > tol::ORTHONORMAL {
        item = orthonormalize(&project_out(&item, p)?)?;
    }
    Ok(item)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::PopularityTable;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn features(counts: Vec<u64>) -> PopularityFeatures {
        PopularityFeatures::build(&PopularityTable(counts), 0.25).unwrap()
    }

    fn spaces_with_item(item: DMatrix<f64>) -> FeatureSpaces {
        FeatureSpaces {
            user: DenseBasis::orthonormal(DMatrix::identity(2, 1)),
            rank: item.ncols(),
            item: DenseBasis::orthonormal(item),
            debiased: false,
        }
    }

    #[test]
    fn rank_one_tensor_recovers_factors() {
        // X^k = σ_k · u vᵀ
        let u = [0usize, 2, 3];
        let v = [1usize, 4];
        let mut coords = Vec::new();
        for k in 0..3 {
            for &a in &u {
                for &b in &v {
                    coords.push((a, b, k));
                }
            }
        }
        let t = InteractionTensor::from_coords(5, 6, vec!["a".into(), "b".into(), "c".into()], coords).unwrap();
        let s = estimate_subspaces(&t, 1, &SvdOptions::new(1).with_tol(1e-13)).unwrap();
        let w = s.user.matrix().column(0);
        let h = s.item.matrix().column(0);
        let expect_u = 1.0 / 3f64.sqrt();
        let expect_v = 1.0 / 2f64.sqrt();
        for i in 0..5 {
            let want = if u.contains(&i) { expect_u } else { 0.0 };
            assert!((w[i].abs() - want).abs() <= 1e-10);
        }
        for j in 0..6 {
            let want = if v.contains(&j) { expect_v } else { 0.0 };
            assert!((h[j].abs() - want).abs() <= 1e-10);
        }
    }

    #[test]
    fn orthogonal_item_space_is_fixed() {
        // both columns are orthogonal to the two popularity classes
        let mut item = DMatrix::zeros(8, 2);
        for (i, x) in [1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0].iter().enumerate() {
            item[(i, 0)] = x / 2f64.sqrt();
        }
        for (i, x) in [0.0, 0.0, 1.0, 1.0, -1.0, -1.0, 0.0, 0.0].iter().enumerate() {
            item[(i, 1)] = x / 2.0;
        }
        let f = features(vec![9, 8, 1, 1, 1, 1, 1, 1]);
        let refined = debias_item_space(&spaces_with_item(item.clone()), &f).unwrap();
        let before = &item * item.transpose();
        let after = refined.item.matrix() * refined.item.matrix().transpose();
        assert!((before - after).amax() <= 1e-10);
    }

    #[test]
    fn popularity_indicator_column_is_removed() {
        let m2 = 12;
        let counts: Vec<u64> = (0..m2 as u64).map(|v| if v < 3 { 10 + v } else { 1 }).collect();
        let f = features(counts);
        let indicator = DMatrix::from_fn(m2, 1, |i, _| if f.is_popular(i) { 1.0 / 3f64.sqrt() } else { 0.0 });
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // random directions orthogonal to the indicator
        let mut rest = DMatrix::from_fn(m2, 3, |_, _| rng.sample(StandardNormal));
        rest -= &indicator * indicator.tr_mul(&rest);
        let rest = orthonormalize(&DenseBasis::new(rest)).unwrap().into_matrix();
        let mut item = DMatrix::zeros(m2, 4);
        item.set_column(0, &indicator.column(0));
        for j in 0..3 {
            item.set_column(j + 1, &rest.column(j));
        }
        let refined = debias_item_space(&spaces_with_item(item), &f).unwrap();
        assert_eq!(refined.item.cols(), 3);
        assert!(refined.item.orthonormality_error() <= 1e-10);
        assert!(max_abs(&f.matrix().tr_mul_dense(refined.item.matrix()).unwrap()) <= 1e-10);
    }

    #[test]
    fn random_item_space_becomes_orthogonal_to_popularity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..10 {
            let m2 = 30;
            let raw = DMatrix::from_fn(m2, 5, |_, _| rng.sample(StandardNormal));
            let item = orthonormalize(&DenseBasis::new(raw)).unwrap().into_matrix();
            let counts = (0..m2).map(|_| rng.random_range(0..20u64)).collect();
            let f = features(counts);
            let refined = debias_item_space(&spaces_with_item(item), &f).unwrap();
            assert!((3..=5).contains(&refined.item.cols()), "trial {trial}");
            assert!(max_abs(&f.matrix().tr_mul_dense(refined.item.matrix()).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn fully_popular_space_is_an_error() {
        let f = features(vec![5, 5, 1, 1]);
        let indicator = DMatrix::from_fn(4, 1, |i, _| if f.is_popular(i) { 1.0 } else { 0.0 });
        assert!(matches!(
            debias_item_space(&spaces_with_item(indicator), &f),
            Err(Error::ZeroBasis)
        ));
    }
}
