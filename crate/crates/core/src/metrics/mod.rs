//! Ranking accuracy and popularity-bias metrics.

mod accuracy;
mod rank;
mod report;

pub use accuracy::{ndcg_at_k, recall_at_k, user_ndcg, user_recall};
pub use rank::{avg_rank_quantiles, average_ranks, pri, spearman, QuantileTable};
pub use report::{evaluate, EvalReport, Evaluation, RunMeta};
