//! Gradient-boosted decision trees for binary classification with logistic
//! loss, second-order leaf weights, and depth-wise or leaf-wise growth.

mod params;
mod persist;
mod train;
mod tree;

pub use params::{GrowthMode, HyperParams};
pub use persist::{load_model, model_from_str, model_to_string, save_model};
pub use train::{train, train_traced, TrainTrace};
pub use tree::{sigmoid, Ensemble, TreeNode};
