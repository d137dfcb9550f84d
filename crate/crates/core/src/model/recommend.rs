use std::cmp::Ordering;

use crate::Result;

/// Anything that can score every item for a user.
pub trait Scorer: Send + Sync {
    fn users(&self) -> usize;
    fn items(&self) -> usize;
    /// Dense score vector of length [`items`](Self::items).
    fn scores(&self, u: usize) -> Result<Vec<f64>>;
}

/// Ordered top-K items for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationList {
    pub user: usize,
    pub items: Vec<usize>,
    pub scores: Vec<f64>,
    /// Fewer than the requested K candidates remained after exclusion.
    pub short: bool,
}

/// Highest `k` scores outside `exclude`, ties by ascending item index.
pub fn top_k_from_scores(user: usize, scores: &[f64], k: usize, exclude: &[usize]) -> RecommendationList {
    let mut blocked = vec![false; scores.len()];
    for &v in exclude {
        if v < blocked.len() {
            blocked[v] = true;
        }
    }
    let mut candidates: Vec<usize> = (0..scores.len()).filter(|&v| !blocked[v]).collect();
    let order = |a: &usize, b: &usize| -> Ordering { scores[*b].total_cmp(&scores[*a]).then(a.cmp(b)) };
    let short = candidates.len() < k;
    if k > 0 && candidates.len() > k {
        candidates.select_nth_unstable_by(k - 1, order);
        candidates.truncate(k);
    }
    candidates.truncate(k);
    candidates.sort_unstable_by(order);
    RecommendationList {
        user,
        scores: candidates.iter().map(|&v| scores[v]).collect(),
        items: candidates,
        short,
    }
}
