//! Slice-rank preference model: unfoldings, feature subspaces, popularity
//! debiasing, closed-form cores and top-K lists.

mod features;
mod fit;
mod io;
mod recommend;
mod spaces;
mod unfold;

pub use features::PopularityFeatures;
pub use fit::{fit, fit_logged, FitConfig, FitLog, FitStep, PreferenceModel};
pub use io::MAGIC;
pub use recommend::{top_k_from_scores, RecommendationList, Scorer};
pub use spaces::{debias_item_space, estimate_subspaces, FeatureSpaces};
pub use unfold::{fold, unfold};
