//! Training hyperparameters covering both growth strategies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How trees grow: level by level to a depth cap, or by repeatedly
/// splitting the frontier leaf with the largest gain up to a leaf budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthMode {
    DepthWise,
    LeafWise,
}

impl GrowthMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GrowthMode::DepthWise => "depth_wise",
            GrowthMode::LeafWise => "leaf_wise",
        }
    }
}

/// Hyperparameters for the boosted-tree trainer.
///
/// `num_leaves` only applies in leaf-wise growth; `gamma` is the minimum
/// split gain in both modes. `scale_pos_weight` multiplies the gradient,
/// hessian and cover contribution of positive rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub growth: GrowthMode,
    pub max_depth: usize,
    pub num_leaves: usize,
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub subsample: f64,
    pub colsample_bytree: f64,
    pub min_child_weight: f64,
    pub min_child_samples: usize,
    pub gamma: f64,
    pub reg_alpha: f64,
    pub reg_lambda: f64,
    pub scale_pos_weight: f64,
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            growth: GrowthMode::DepthWise,
            max_depth: 6,
            num_leaves: 31,
            n_estimators: 150,
            learning_rate: 0.1,
            subsample: 1.0,
            colsample_bytree: 1.0,
            min_child_weight: 1.0,
            min_child_samples: 1,
            gamma: 0.0,
            reg_alpha: 0.0,
            reg_lambda: 1.0,
            scale_pos_weight: 1.0,
            seed: 0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 {
            return Err(Error::Train("max_depth must be at least 1".into()));
        }
        if self.growth == GrowthMode::LeafWise && self.num_leaves < 2 {
            return Err(Error::Train("num_leaves must be at least 2".into()));
        }
        if self.n_estimators == 0 {
            return Err(Error::Train("n_estimators must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Train(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        for (name, v) in [("subsample", self.subsample), ("colsample_bytree", self.colsample_bytree)]
        {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Train(format!("{name} must be in (0, 1], got {v}")));
            }
        }
        for (name, v) in [
            ("min_child_weight", self.min_child_weight),
            ("gamma", self.gamma),
            ("reg_alpha", self.reg_alpha),
            ("reg_lambda", self.reg_lambda),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Train(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.scale_pos_weight > 0.0 && self.scale_pos_weight.is_finite()) {
            return Err(Error::Train(format!(
                "scale_pos_weight must be positive, got {}",
                self.scale_pos_weight
            )));
        }
        Ok(())
    }
}
