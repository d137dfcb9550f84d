use std::collections::BTreeMap;
use std::sync::Arc;

use super::ItemPop;
use crate::data::InteractionTensor;
use crate::model::{fit, FitConfig, Scorer};
use crate::{Error, Result};

/// A recommender that can be trained on a tensor and then score users.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &str;

    /// `(use_si, use_pop)` for model-based strategies.
    fn flags(&self) -> Option<(bool, bool)>;

    fn fit(&self, train: &InteractionTensor, config: &FitConfig) -> Result<Box<dyn Scorer>>;
}

/// The slice-rank model with fixed side-information and debias flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PopsiVariant {
    pub name: &'static str,
    pub use_si: bool,
    pub use_pop: bool,
}

impl PopsiVariant {
    pub const MATRIX: Self = Self { name: "popsi_matrix", use_si: false, use_pop: false };
    pub const MATRIX_POP: Self = Self { name: "popsi_matrix_pop", use_si: false, use_pop: true };
    pub const TENSOR: Self = Self { name: "popsi_tensor", use_si: true, use_pop: false };
    pub const FULL: Self = Self { name: "popsi_full", use_si: true, use_pop: true };

    pub const ALL: [Self; 4] = [Self::MATRIX, Self::MATRIX_POP, Self::TENSOR, Self::FULL];

    pub fn from_flags(use_si: bool, use_pop: bool) -> Self {
        *Self::ALL
            .iter()
            .find(|v| v.use_si == use_si && v.use_pop == use_pop)
            .expect("all four flag pairs are covered")
    }
}

impl Strategy for PopsiVariant {
    fn name(&self) -> &str {
        self.name
    }

    fn flags(&self) -> Option<(bool, bool)> {
        Some((self.use_si, self.use_pop))
    }

    fn fit(&self, train: &InteractionTensor, config: &FitConfig) -> Result<Box<dyn Scorer>> {
        let config = FitConfig { use_si: self.use_si, use_pop: self.use_pop, ..config.clone() };
        Ok(Box::new(fit(train, &config)?))
    }
}

/// Strategies keyed by name.
#[derive(Clone, Default)]
pub struct Registry {
    strategies: BTreeMap<String, Arc<dyn Strategy>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `itempop`, `popsi_matrix`, `popsi_matrix_pop`, `popsi_tensor`, `popsi_full`.
    pub fn builtin() -> Self {
        let mut registry = Self::new();
        registry.register(Arc::new(ItemPop));
        for variant in PopsiVariant::ALL {
            registry.register(Arc::new(variant));
        }
        registry
    }

    /// Adds or replaces the strategy under its own name.
    pub fn register(&mut self, strategy: Arc<dyn Strategy>) {
        self.strategies.insert(strategy.name().to_owned(), strategy);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Strategy>> {
        self.strategies
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.strategies.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        let names: Vec<_> = Registry::builtin().names().map(str::to_owned).collect();
        assert_eq!(names, ["itempop", "popsi_full", "popsi_matrix", "popsi_matrix_pop", "popsi_tensor"]);
        assert!(matches!(Registry::builtin().get("bpr"), Err(Error::UnknownStrategy(_))));
    }

    #[test]
    fn flag_mapping() {
        assert_eq!(PopsiVariant::from_flags(true, true), PopsiVariant::FULL);
        assert_eq!(PopsiVariant::from_flags(false, false), PopsiVariant::MATRIX);
        let full = Registry::builtin().get("popsi_full").unwrap();
        assert_eq!(full.flags(), Some((true, true)));
    }
}
