//! Interaction logs, indexed tensors, holdout splits and popularity counts.

mod parse;
mod popularity;
mod split;
mod tensor;

pub use parse::{parse_interactions, Column, ColumnSchema, InteractionRecord, ParseOutcome};
pub use popularity::{item_popularity, PopularityTable};
pub use split::{split_holdout, HoldoutSets, SplitSpec};
pub use tensor::{build_tensor, IdIndex, InteractionTensor};
