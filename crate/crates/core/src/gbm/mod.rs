//! Gradient-boosted regression trees with squared-error loss, exact greedy
//! splits, shrinkage and minimum-gain pruning.

mod grid;
mod grow;
mod model;
mod tree;

pub use grid::{grid_search, GridRanges, GridResult, GridRow};
pub use grow::{leaf_weight, split_gain, split_threshold};
pub use model::{train, train_traced, Ensemble, Hyperparams, Regressor, MODEL_SCHEMA_VERSION};
pub use tree::TreeNode;

pub(crate) use model::{check_width, fit_cart};
