//! Binary decision trees with leaf weights and per-node cover, and the
//! additive ensemble over them.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// One tree node. `cover` is the scale-weighted count of training rows
/// routed through the node within the tree's sampled subset; it satisfies
/// `cover(parent) = cover(left) + cover(right)` and feeds the SHAP
/// conditioning distribution. Navigation: go left iff `x[feature] < threshold`.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        cover: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        weight: f64,
        cover: f64,
    },
}

impl TreeNode {
    pub fn cover(&self) -> f64 {
        match self {
            TreeNode::Internal { cover, .. } | TreeNode::Leaf { cover, .. } => *cover,
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { weight, .. } => *weight,
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                if row[*feature] < *threshold {
                    left.predict(row)
                } else {
                    right.predict(row)
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Largest feature index referenced by any split, if any.
    pub fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Internal {
                feature,
                left,
                right,
                ..
            } => {
                let m = left.max_feature().into_iter().chain(right.max_feature()).max();
                Some(m.map_or(*feature, |x| x.max(*feature)))
            }
        }
    }

    /// Cover-weighted mean of leaf weights: the tree's expected output
    /// under the cover distribution.
    pub fn expected_value(&self) -> f64 {
        match self {
            TreeNode::Leaf { weight, .. } => *weight,
            TreeNode::Internal {
                cover, left, right, ..
            } => (left.cover() * left.expected_value() + right.cover() * right.expected_value())
                / cover,
        }
    }

    /// Check `cover(parent) = cover(left) + cover(right)` and positivity
    /// throughout, within `tol`.
    pub fn cover_consistent(&self, tol: f64) -> bool {
        match self {
            TreeNode::Leaf { cover, .. } => *cover > 0.0,
            TreeNode::Internal {
                cover, left, right, ..
            } => {
                *cover > 0.0
                    && (cover - (left.cover() + right.cover())).abs() <= tol * cover.max(1.0)
                    && left.cover_consistent(tol)
                    && right.cover_consistent(tol)
            }
        }
    }
}

/// Additive model: `margin(x) = base_score + sum of tree outputs`,
/// `probability = sigmoid(margin)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub base_score: f64,
    pub trees: Vec<TreeNode>,
    pub encoded_names: Vec<String>,
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl Ensemble {
    pub fn n_features(&self) -> usize {
        self.encoded_names.len()
    }

    fn check_width(&self, cols: usize) -> Result<()> {
        if cols != self.n_features() {
            return Err(Error::Train(format!(
                "input has {cols} features, model expects {}",
                self.n_features()
            )));
        }
        Ok(())
    }

    pub fn margin_row(&self, row: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
    }

    pub fn predict_margin(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.check_width(x.n_cols())?;
        Ok(x.iter_rows().map(|r| self.margin_row(r)).collect())
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        Ok(self.predict_margin(x)?.into_iter().map(sigmoid).collect())
    }

    /// Label 1 iff predicted probability >= threshold.
    pub fn predict_label(&self, x: &Matrix, threshold: f64) -> Result<Vec<u8>> {
        Ok(self
            .predict_proba(x)?
            .into_iter()
            .map(|p| u8::from(p >= threshold))
            .collect())
    }

    /// Expected margin under the cover distribution: the SHAP base value.
    pub fn expected_margin(&self) -> f64 {
        self.base_score + self.trees.iter().map(TreeNode::expected_value).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn stump(feature: usize, threshold: f64, left_w: f64, right_w: f64) -> TreeNode {
        TreeNode::Internal {
            feature,
            threshold,
            cover: 100.0,
            left: Box::new(TreeNode::Leaf {
                weight: left_w,
                cover: 50.0,
            }),
            right: Box::new(TreeNode::Leaf {
                weight: right_w,
                cover: 50.0,
            }),
        }
    }

    #[test]
    fn empty_ensemble_predicts_base_score() {
        let ens = Ensemble {
            base_score: -0.3,
            trees: vec![],
            encoded_names: vec!["a".into(), "b".into()],
        };
        let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![5.0, -2.0]]).unwrap();
        assert_eq!(ens.predict_margin(&x).unwrap(), vec![-0.3, -0.3]);
    }

    #[test]
    fn stump_margin_and_probability() {
        let ens = Ensemble {
            base_score: 0.0,
            trees: vec![stump(0, 0.5, -1.0, 1.0)],
            encoded_names: vec!["x0".into()],
        };
        let x = Matrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let m = ens.predict_margin(&x).unwrap();
        assert_eq!(m, vec![1.0, -1.0]);
        let p = ens.predict_proba(&x).unwrap();
        assert!((p[0] - 0.7311).abs() < 1e-4);
        let labels = ens.predict_label(&x, 0.5).unwrap();
        assert_eq!(labels, vec![1, 0]);
    }

    #[test]
    fn margin_is_additive_over_trees() {
        let trees = vec![stump(0, 0.5, -1.0, 1.0), stump(1, 0.0, 0.25, -0.75)];
        let ens = Ensemble {
            base_score: 0.1,
            trees: trees.clone(),
            encoded_names: vec!["x0".into(), "x1".into()],
        };
        let x = Matrix::from_rows(&[vec![0.7, -0.2], vec![0.1, 0.4]]).unwrap();
        for row in x.iter_rows() {
            let direct = ens.margin_row(row);
            let manual: f64 = 0.1 + trees.iter().map(|t| t.predict(row)).sum::<f64>();
            assert!((direct - manual).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let ens = Ensemble {
            base_score: 0.0,
            trees: vec![],
            encoded_names: vec!["a".into()],
        };
        let x = Matrix::from_rows(&[vec![0.0, 1.0]]).unwrap();
        assert!(ens.predict_margin(&x).is_err());
    }

    #[test]
    fn expected_value_is_cover_weighted() {
        let t = stump(0, 0.0, -2.0, 4.0);
        assert_eq!(t.expected_value(), 1.0);
        assert!(t.cover_consistent(1e-12));
    }
}
