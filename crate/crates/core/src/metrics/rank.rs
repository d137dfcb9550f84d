use std::collections::BTreeMap;

use crate::data::PopularityTable;
use crate::{Error, Result};

/// 1-based fractional ranks; tied values share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        let shared = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of average-tie ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { context: "spearman inputs", expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("spearman needs at least two observations".into()));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mean, b - mean);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantVector);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Per-item mean rank-position quantile over the users holding it as a
/// positive.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuantileTable {
    /// Item index to averaged quantile in `(0, 1]`.
    pub items: BTreeMap<usize, f64>,
    /// Users with at least two positives.
    pub users_used: usize,
    /// Users with exactly one positive.
    pub users_skipped: usize,
}

/// Averages, per item, the quantile `rank / |Pos_u|` of the item among the
/// user's positives ordered by descending score (ties by ascending index).
/// Users with fewer than two positives contribute nothing.
pub fn avg_rank_quantiles<F>(mut scores: F, positives: &[Vec<usize>]) -> Result<QuantileTable>
where
    F: FnMut(usize) -> Result<Vec<f64>>,
{
    let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    let mut table = QuantileTable::default();
    for (u, pos) in positives.iter().enumerate() {
        match pos.len() {
            0 => continue,
            1 => {
                table.users_skipped += 1;
                continue;
            }
            _ => {}
        }
        let s = scores(u)?;
        for &v in pos {
            if v >= s.len() {
                return Err(Error::IndexOutOfRange { what: "items", index: v, len: s.len() });
            }
        }
        let mut ordered = pos.clone();
        ordered.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
        let size = ordered.len() as f64;
        for (i, &v) in ordered.iter().enumerate() {
            let e = sums.entry(v).or_insert((0.0, 0));
            e.0 += (i + 1) as f64 / size;
            e.1 += 1;
        }
        table.users_used += 1;
    }
    table.items = sums.into_iter().map(|(v, (sum, n))| (v, sum / n as f64)).collect();
    Ok(table)
}

/// Popularity-rank correlation: `-spearman(pop, avg_rank)` over the items in
/// the table. Near 1 when popular positives are ranked first.
pub fn pri(table: &QuantileTable, pop: &PopularityTable) -> Result<f64> {
    if table.items.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "PRI needs at least two items, table has {}",
            table.items.len()
        )));
    }
    let mut pops = Vec::with_capacity(table.items.len());
    let mut ranks = Vec::with_capacity(table.items.len());
    for (&v, &q) in &table.items {
        let count = *pop.counts().get(v).ok_or(Error::IndexOutOfRange { what: "items", index: v, len: pop.len() })?;
        pops.push(count as f64);
        ranks.push(q);
    }
    Ok(-spearman(&pops, &ranks)?)
}
