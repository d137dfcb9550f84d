use super::Strategy;
use crate::data::{item_popularity, InteractionTensor, PopularityTable};
use crate::model::{top_k_from_scores, FitConfig, RecommendationList, Scorer};
use crate::Result;

/// Global purchase-count ranking, identical for every user.
#[derive(Debug, Clone, Copy, Default)]
pub struct ItemPop;

#[derive(Debug, Clone)]
pub struct ItemPopScorer {
    users: usize,
    pop: PopularityTable,
}

impl ItemPopScorer {
    pub fn new(users: usize, pop: PopularityTable) -> Self {
        Self { users, pop }
    }
}

impl Scorer for ItemPopScorer {
    fn users(&self) -> usize {
        self.users
    }

    fn items(&self) -> usize {
        self.pop.len()
    }

    fn scores(&self, _u: usize) -> Result<Vec<f64>> {
        Ok(self.pop.counts().iter().map(|&c| c as f64).collect())
    }
}

impl Strategy for ItemPop {
    fn name(&self) -> &str {
        "itempop"
    }

    fn flags(&self) -> Option<(bool, bool)> {
        None
    }

    fn fit(&self, train: &InteractionTensor, _config: &FitConfig) -> Result<Box<dyn Scorer>> {
        Ok(Box::new(ItemPopScorer::new(train.users(), item_popularity(train.target()))))
    }
}

/// Items by (count desc, index asc) with `exclude` removed, cut to `k`.
pub fn itempop_recommend(pop: &PopularityTable, user: usize, k: usize, exclude: &[usize]) -> RecommendationList {
    let scores: Vec<f64> = pop.counts().iter().map(|&c| c as f64).collect();
    top_k_from_scores(user, &scores, k, exclude)
}
