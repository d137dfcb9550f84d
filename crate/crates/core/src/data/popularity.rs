use crate::linalg::SparseMatrix;

/// Per-item interaction counts on the training target slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopularityTable(pub Vec<u64>);

impl PopularityTable {
    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Item indices by decreasing count, ties by ascending index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.0.len()).collect();
        order.sort_by(|&a, &b| self.0[b].cmp(&self.0[a]).then(a.cmp(&b)));
        order
    }
}

/// Number of users with an entry on each item.
pub fn item_popularity(target: &SparseMatrix) -> PopularityTable {
    let mut counts = vec![0u64; target.cols()];
    for (_, v, _) in target.iter() {
        counts[v] += 1;
    }
    PopularityTable(counts)
}
