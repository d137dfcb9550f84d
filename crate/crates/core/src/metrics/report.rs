use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::{avg_rank_quantiles, pri, user_ndcg, user_recall};
use crate::data::PopularityTable;
use crate::linalg::SparseMatrix;
use crate::model::{top_k_from_scores, Scorer};
use crate::{Error, Result};

/// Metric values of one evaluation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub recall: BTreeMap<usize, f64>,
    pub ndcg: BTreeMap<usize, f64>,
    /// `None` when fewer than two items carry quantiles or popularity is constant.
    pub pri: Option<f64>,
    pub users_evaluated: usize,
    pub users_skipped_pri: usize,
}

/// Configuration echoed into a report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub variant: String,
    pub r: usize,
    pub p: f64,
    pub use_si: bool,
    pub use_pop: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub metrics: Evaluation,
    pub config: RunMeta,
}

impl EvalReport {
    /// Flat JSON object: `recall_at_{K}`, `ndcg_at_{K}` per cutoff, then `pri`,
    /// `users_evaluated`, `users_skipped_pri` and a `config` object.
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        for (k, v) in &self.metrics.recall {
            obj.insert(format!("recall_at_{k}"), json!(v));
        }
        for (k, v) in &self.metrics.ndcg {
            obj.insert(format!("ndcg_at_{k}"), json!(v));
        }
        obj.insert("pri".into(), json!(self.metrics.pri));
        obj.insert("users_evaluated".into(), json!(self.metrics.users_evaluated));
        obj.insert("users_skipped_pri".into(), json!(self.metrics.users_skipped_pri));
        let c = &self.config;
        obj.insert(
            "config".into(),
            json!({
                "r": c.r,
                "p": c.p,
                "use_si": c.use_si,
                "use_pop": c.use_pop,
                "seed": c.seed,
                "variant": c.variant,
            }),
        );
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report is valid JSON");
        s.push('\n');
        s
    }
}

/// Scores every user once and computes Recall@K and NDCG@K for each cutoff
/// plus PRI over `positives`.
///
/// Items in `exclude`'s row for a user are removed from that user's list.
pub fn evaluate(
    scorer: &dyn Scorer,
    positives: &[Vec<usize>],
    exclude: Option<&SparseMatrix>,
    pop: &PopularityTable,
    ks: &[usize],
) -> Result<Evaluation> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::InvalidArgument("cutoffs must be non-empty and at least 1".into()));
    }
    if positives.len() != scorer.users() {
        return Err(Error::DimensionMismatch { context: "users in holdout vs model", expected: scorer.users(), found: positives.len() });
    }
    if pop.len() != scorer.items() {
        return Err(Error::DimensionMismatch { context: "items in popularity vs model", expected: scorer.items(), found: pop.len() });
    }
    if let Some(x) = exclude {
        if x.rows() != scorer.users() || x.cols() != scorer.items() {
            return Err(Error::DimensionMismatch { context: "exclusion matrix rows", expected: scorer.users(), found: x.rows() });
        }
    }
    let deepest = *ks.iter().max().unwrap();
    let mut recall: BTreeMap<usize, f64> = ks.iter().map(|&k| (k, 0.0)).collect();
    let mut ndcg = recall.clone();
    let mut cached: Vec<Option<Vec<f64>>> = vec![None; positives.len()];

    for (u, pos) in positives.iter().enumerate() {
        if pos.is_empty() {
            continue;
        }
        let scores = scorer.scores(u)?;
        let excluded = exclude.map(|x| x.row(u).0).unwrap_or(&[]);
        let list = top_k_from_scores(u, &scores, deepest, excluded);
        for (&k, total) in recall.iter_mut() {
            *total += user_recall(&list.items, pos, k);
        }
        for (&k, total) in ndcg.iter_mut() {
            *total += user_ndcg(&list.items, pos, k);
        }
        if pos.len() >= 2 {
            cached[u] = Some(scores);
        }
    }
    let n = positives.len().max(1) as f64;
    recall.values_mut().for_each(|v| *v /= n);
    ndcg.values_mut().for_each(|v| *v /= n);

    let table = avg_rank_quantiles(
        |u| match cached[u].take() {
            Some(s) => Ok(s),
            None => scorer.scores(u),
        },
        positives,
    )?;
    let pri = match pri(&table, pop) {
        Ok(v) => Some(v),
        Err(Error::ConstantVector | Error::InvalidArgument(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Evaluation {
        recall,
        ndcg,
        pri,
        users_evaluated: positives.len(),
        users_skipped_pri: table.users_skipped,
    })
}
