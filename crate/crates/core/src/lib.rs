//! Popularity-aware top-K recommendation from multi-behavior implicit feedback.
//!
//! The pipeline estimates shared user and item feature subspaces from the
//! unfoldings of a binary user × item × behavior tensor, removes the
//! popularity directions from the item space by orthogonal projection, and
//! scores items through closed-form per-behavior core matrices.
//!
//! Modules:
//! - [`data`]: ingestion, indexing, holdout splits and popularity counts.
//! - [`linalg`]: sparse kernels, truncated SVD and subspace projections.
//! - [`model`]: unfoldings, feature spaces, fitting and scoring.
//! - [`metrics`]: Recall@K, NDCG@K, Spearman correlation and PRI.
//! - [`baselines`]: named recommender strategies and variant evaluation.
//! - [`synth`]: synthetic multi-behavior tensors with planted structure.

pub mod baselines;
pub mod data;
mod error;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
