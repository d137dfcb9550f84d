//! Named recommender strategies and the variant evaluation harness.
//!
//! Every strategy implements [`Strategy`] and is looked up by name in a
//! [`Registry`]. The built-in registry holds `itempop` and the four
//! combinations of side information and popularity debiasing.

mod itempop;
mod registry;
mod variant;

pub use itempop::{itempop_recommend, ItemPop, ItemPopScorer};
pub use registry::{PopsiVariant, Registry, Strategy};
pub use variant::{run_variant, run_variant_with, BaselineSpec, EvalSplit, VariantParams};
