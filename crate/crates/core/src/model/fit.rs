use std::time::Instant;

use log::debug;
use nalgebra::{DMatrix, RowDVector};

use super::spaces::{estimate_item_space, estimate_user_space, project_item_space, reorthonormalize_item_space};
use super::{top_k_from_scores, FeatureSpaces, PopularityFeatures, RecommendationList, Scorer};
use crate::data::{item_popularity, InteractionTensor};
use crate::linalg::{DenseBasis, SvdOptions};
use crate::{Error, Result};

/// Hyper-parameters of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Slice rank `r`.
    pub rank: usize,
    /// Share of items labelled popular.
    pub popular_fraction: f64,
    /// Use every behavior slice; otherwise the target slice alone.
    pub use_si: bool,
    /// Project popularity out of the item space.
    pub use_pop: bool,
    pub oversampling: usize,
    pub power_iters: usize,
    pub svd_tol: Option<f64>,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        let svd = SvdOptions::new(200);
        Self {
            rank: 200,
            popular_fraction: 0.2,
            use_si: true,
            use_pop: true,
            oversampling: svd.oversampling,
            power_iters: svd.power_iters,
            svd_tol: svd.tol,
            max_iters: svd.max_iters,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn svd_options(&self) -> SvdOptions {
        SvdOptions {
            rank: self.rank,
            oversampling: self.oversampling,
            power_iters: self.power_iters,
            seed: self.seed,
            tol: self.svd_tol,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitStep {
    pub name: &'static str,
    pub seconds: f64,
    pub skipped: bool,
}

/// Per-step timings of a fit plus the final item-space width.
#[derive(Debug, Clone, PartialEq)]
pub struct FitLog {
    pub rank: usize,
    pub refined_rank: usize,
    pub steps: Vec<FitStep>,
}

impl std::fmt::Display for FitLog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "r = {}", self.rank)?;
        writeln!(f, "r' = {}", self.refined_rank)?;
        for (i, step) in self.steps.iter().enumerate() {
            if step.skipped {
                writeln!(f, "step {}: {}: skipped", i + 1, step.name)?;
            } else {
                writeln!(f, "step {}: {}: {:.3}s", i + 1, step.name, step.seconds)?;
            }
        }
        Ok(())
    }
}

/// Fitted bases and per-behavior core matrices `Sᵏ = Wᵀ Xᵏ H`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceModel {
    pub spaces: FeatureSpaces,
    pub cores: Vec<DMatrix<f64>>,
    pub labels: Vec<String>,
    pub popular_fraction: f64,
    pub use_si: bool,
    pub use_pop: bool,
}

/// Fits the model on a training tensor.
pub fn fit(train: &InteractionTensor, config: &FitConfig) -> Result<PreferenceModel> {
    fit_logged(train, config).map(|(model, _)| model)
}

/// [`fit`] plus per-step timings.
pub fn fit_logged(train: &InteractionTensor, config: &FitConfig) -> Result<(PreferenceModel, FitLog)> {
    let source = if config.use_si { train.clone() } else { train.target_only() };
    let svd = config.svd_options();
    let mut steps = Vec::with_capacity(5);
    let mut timed = |name: &'static str, skipped: bool, started: Instant| {
        let seconds = started.elapsed().as_secs_f64();
        debug!("{name}: {seconds:.3}s");
        steps.push(FitStep { name, seconds, skipped });
    };

    let started = Instant::now();
    let user = estimate_user_space(&source, config.rank, &svd).map_err(|e| e.in_step("user subspace"))?;
    timed("user subspace", false, started);

    let started = Instant::now();
    let item = estimate_item_space(&source, config.rank, &svd).map_err(|e| e.in_step("item subspace"))?;
    timed("item subspace", false, started);

    let mut spaces = FeatureSpaces { user, item, rank: config.rank, debiased: false };
    if config.use_pop {
        let started = Instant::now();
        let features = PopularityFeatures::build(&item_popularity(train.target()), config.popular_fraction)
            .map_err(|e| e.in_step("popularity projection"))?;
        let projected =
            project_item_space(&spaces.item, &features).map_err(|e| e.in_step("popularity projection"))?;
        timed("popularity projection", false, started);

        let started = Instant::now();
        spaces.item = reorthonormalize_item_space(&projected, &features).map_err(|e| e.in_step("re-orthonormalization"))?;
        spaces.debiased = true;
        timed("re-orthonormalization", false, started);
    } else {
        timed("popularity projection", true, Instant::now());
        timed("re-orthonormalization", true, Instant::now());
    }

    let started = Instant::now();
    let cores = source
        .slices()
        .iter()
        .map(|x| core_matrix(&spaces.user, x, &spaces.item))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_step("core matrices"))?;
    timed("core matrices", false, started);

    let log = FitLog { rank: config.rank, refined_rank: spaces.item.cols(), steps };
    let model = PreferenceModel {
        spaces,
        cores,
        labels: source.labels().to_vec(),
        popular_fraction: config.popular_fraction,
        use_si: config.use_si,
        use_pop: config.use_pop,
    };
    Ok((model, log))
}

fn core_matrix(w: &DenseBasis, x: &crate::linalg::SparseMatrix, h: &DenseBasis) -> Result<DMatrix<f64>> {
    let xh = x.mul_dense(h.matrix())?;
    Ok(w.matrix().tr_mul(&xh))
}

impl PreferenceModel {
    pub fn users(&self) -> usize {
        self.spaces.user.rows()
    }

    pub fn items(&self) -> usize {
        self.spaces.item.rows()
    }

    /// Rank requested at fit time.
    pub fn rank(&self) -> usize {
        self.spaces.rank
    }

    /// Width of the item basis after any refinement.
    pub fn refined_rank(&self) -> usize {
        self.spaces.item.cols()
    }

    /// Row `u` of `W Wᵀ Xᵏ H Hᵀ`, evaluated as `(W_u Sᵏ) Hᵀ`.
    pub fn score_user_slice(&self, u: usize, slice: usize) -> Result<Vec<f64>> {
        if u >= self.users() {
            return Err(Error::IndexOutOfRange { what: "users", index: u, len: self.users() });
        }
        let core = self
            .cores
            .get(slice)
            .ok_or(Error::IndexOutOfRange { what: "behaviors", index: slice, len: self.cores.len() })?;
        let latent: RowDVector<f64> = self.spaces.user.matrix().row(u) * core;
        Ok((self.spaces.item.matrix() * latent.transpose()).data.into())
    }

    /// Target-behavior scores for user `u`.
    pub fn score_user(&self, u: usize) -> Result<Vec<f64>> {
        self.score_user_slice(u, 0)
    }

    pub fn top_k(&self, u: usize, k: usize, exclude: &[usize]) -> Result<RecommendationList> {
        Ok(top_k_from_scores(u, &self.score_user(u)?, k, exclude))
    }
}

impl Scorer for PreferenceModel {
    fn users(&self) -> usize {
        PreferenceModel::users(self)
    }

    fn items(&self) -> usize {
        PreferenceModel::items(self)
    }

    fn scores(&self, u: usize) -> Result<Vec<f64>> {
        self.score_user(u)
    }
}
