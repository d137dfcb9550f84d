use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::InteractionTensor;
use crate::linalg::SparseMatrix;
use crate::{Error, Result};

/// Train/validation/test ratios over the target-behavior entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train: 0.8, val: 0.1, test: 0.1, seed: 0 }
    }
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64, seed: u64) -> Result<Self> {
        let spec = Self { train, val, test, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ratios = [self.train, self.val, self.test];
        if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::InvalidArgument(format!("split ratios {ratios:?} must lie in [0, 1]")));
        }
        if (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("split ratios {ratios:?} must sum to 1")));
        }
        Ok(())
    }

    /// `(train, val, test)` sizes for `n` entries: floor, floor, remainder.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let floor = |ratio: f64| ((ratio * n as f64) + 1e-9).floor() as usize;
        let train = floor(self.train).min(n);
        let val = floor(self.val).min(n - train);
        (train, val, n - train - val)
    }
}

/// Training tensor plus held-out target-behavior positives per user.
#[derive(Debug, Clone, PartialEq)]
pub struct HoldoutSets {
    pub train: InteractionTensor,
    /// Sorted item indices per user.
    pub val_positives: Vec<Vec<usize>>,
    pub test_positives: Vec<Vec<usize>>,
}

impl HoldoutSets {
    /// Sorted training target items of user `u`.
    pub fn train_items(&self, u: usize) -> &[usize] {
        self.train.target().row(u).0
    }
}

/// Splits the target slice at random; auxiliary slices stay in training.
pub fn split_holdout(tensor: &InteractionTensor, spec: &SplitSpec) -> Result<HoldoutSets> {
    spec.validate()?;
    let mut entries: Vec<(usize, usize)> = tensor.target().iter().map(|(u, v, _)| (u, v)).collect();
    if entries.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "target behavior has {} entries; at least 3 are needed to split",
            entries.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    entries.shuffle(&mut rng);
    let (n_train, n_val, _) = spec.counts(entries.len());

    let (m1, m2, _) = tensor.dims();
    let train_target = SparseMatrix::from_pattern(m1, m2, &entries[..n_train])?;
    let mut slices = tensor.slices().to_vec();
    slices[0] = train_target;
    let train = InteractionTensor::new(m1, m2, tensor.labels().to_vec(), slices)?;

    let per_user = |part: &[(usize, usize)]| {
        let mut lists = vec![Vec::new(); m1];
        for &(u, v) in part {
            lists[u].push(v);
        }
        for l in &mut lists {
            l.sort_unstable();
        }
        lists
    };
    Ok(HoldoutSets {
        train,
        val_positives: per_user(&entries[n_train..n_train + n_val]),
        test_positives: per_user(&entries[n_train + n_val..]),
    })
}
