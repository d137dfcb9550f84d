use crate::data::PopularityTable;
use crate::linalg::SparseMatrix;
use crate::{Error, Result};

/// Two-class one-hot popularity encoding of the items.
///
/// Column 0 marks the popular items, column 1 the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityFeatures {
    fraction: f64,
    popular: Vec<bool>,
    matrix: SparseMatrix,
}

impl PopularityFeatures {
    /// Marks the top `⌈fraction · m₂⌉` items by count as popular; ties at the
    /// cut go to the lower item index.
    pub fn build(pop: &PopularityTable, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::InvalidArgument(format!("popular fraction {fraction} must lie in (0, 1)")));
        }
        let m2 = pop.len();
        let cut = ((fraction * m2 as f64 - 1e-9).ceil().max(0.0) as usize).min(m2);
        let mut popular = vec![false; m2];
        for &v in pop.ranking().iter().take(cut) {
            popular[v] = true;
        }
        let coords: Vec<(usize, usize)> =
            popular.iter().enumerate().map(|(v, &hot)| (v, if hot { 0 } else { 1 })).collect();
        let matrix = SparseMatrix::from_pattern(m2, 2, &coords)?;
        Ok(Self { fraction, popular, matrix })
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    pub fn is_popular(&self, item: usize) -> bool {
        self.popular[item]
    }

    pub fn popular_items(&self) -> Vec<usize> {
        (0..self.popular.len()).filter(|&v| self.popular[v]).collect()
    }

    /// The `m₂ × 2` one-hot matrix.
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }
}
