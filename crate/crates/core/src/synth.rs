//! Synthetic multi-behavior tensors with a planted slice-rank structure and
//! an optional popularity confound on the target slice.
//!
//! Each slice is drawn as independent Bernoulli entries with probabilities
//! proportional to `W Sᵏ Hᵀ`, where the user factors `W`, item factors `H`
//! and cores `Sᵏ` are non-negative and shared ranks give a slice rank of
//! `rank`. The confound mixes a user-independent long-tail item propensity
//! into the target probabilities only.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::InteractionTensor;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub users: usize,
    pub items: usize,
    pub rank: usize,
    /// Expected density of each slice, target first.
    pub densities: Vec<f64>,
    /// Share of the target-slice probability mass driven by item popularity.
    pub confound: f64,
    /// Exponent of the Zipf-like propensity `(1 + rank)^-exponent`.
    pub confound_exponent: f64,
    /// Spread of the log-normal latent factors; larger is more personalized.
    pub factor_spread: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            users: 300,
            items: 200,
            rank: 5,
            densities: vec![0.05, 0.15, 0.1],
            confound: 0.3,
            confound_exponent: 1.0,
            factor_spread: 2.0,
            seed: 0,
        }
    }
}

/// Generated tensor plus the planted item propensities.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub tensor: InteractionTensor,
    /// Confound propensity per item, normalized to mean 1.
    pub propensity: Vec<f64>,
}

pub fn generate(config: &SyntheticConfig) -> Result<Synthetic> {
    let SyntheticConfig { users, items, rank, .. } = *config;
    if users == 0 || items == 0 || rank == 0 || config.densities.is_empty() {
        return Err(Error::InvalidArgument("synthetic dimensions must be positive".into()));
    }
    if !(0.0..=1.0).contains(&config.confound) || config.densities.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
        return Err(Error::InvalidArgument("confound and densities must lie in (0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let spread = config.factor_spread;
    let mut lognormal = |rows: usize, cols: usize| {
        DMatrix::from_fn(rows, cols, |_, _| (spread * rng.sample::<f64, _>(StandardNormal)).exp())
    };
    let w = lognormal(users, rank);
    let h = lognormal(items, rank);

    let mut order: Vec<usize> = (0..items).collect();
    order.shuffle(&mut rng);
    let mut propensity = vec![0.0; items];
    for (position, &v) in order.iter().enumerate() {
        propensity[v] = (1.0 + position as f64).powf(-config.confound_exponent);
    }
    let mean = propensity.iter().sum::<f64>() / items as f64;
    propensity.iter_mut().for_each(|q| *q /= mean);

    let mut coords = Vec::new();
    for (k, &density) in config.densities.iter().enumerate() {
        let core = DMatrix::from_fn(rank, rank, |i, j| {
            let diagonal = if i == j { 1.0 } else { 0.0 };
            diagonal + 0.3 * rng.random::<f64>()
        });
        let theta = &w * core * h.transpose();
        let scale = density / theta.mean();
        let confound = if k == 0 { config.confound } else { 0.0 };
        for u in 0..users {
            for v in 0..items {
                let p = (1.0 - confound) * scale * theta[(u, v)] + confound * density * propensity[v];
                if rng.random::<f64>() < p.min(1.0) {
                    coords.push((u, v, k));
                }
            }
        }
    }
    let labels = (0..config.densities.len())
        .map(|k| if k == 0 { "purchase".to_owned() } else { format!("behavior{k}") })
        .collect();
    let tensor = InteractionTensor::from_coords(users, items, labels, coords)?;
    Ok(Synthetic { tensor, propensity })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_density() {
        let s = generate(&SyntheticConfig { seed: 3, ..Default::default() }).unwrap();
        assert_eq!(s.tensor.dims(), (300, 200, 3));
        let density = s.tensor.target().nnz() as f64 / 60_000.0;
        assert!((0.03..0.07).contains(&density), "{density}");
    }

    #[test]
    fn deterministic() {
        let cfg = SyntheticConfig { users: 40, items: 30, seed: 9, ..Default::default() };
        assert_eq!(generate(&cfg).unwrap().tensor, generate(&cfg).unwrap().tensor);
    }
}
