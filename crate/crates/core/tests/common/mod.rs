//! Shared helpers for the integration suites: random ensemble generation
//! and the brute-force KNN imputation oracle.

use rand::Rng;
use shapsel::gbdt::{Ensemble, TreeNode};

pub fn random_tree(rng: &mut impl Rng, n_features: usize, max_depth: usize, cover: f64) -> TreeNode {
    if max_depth == 0 || rng.gen::<f64>() < 0.25 {
        return TreeNode::Leaf {
            weight: rng.gen_range(-2.0..2.0),
            cover,
        };
    }
    let left_cover = cover * rng.gen_range(0.2..0.8);
    let right_cover = cover - left_cover;
    TreeNode::Internal {
        feature: rng.gen_range(0..n_features),
        threshold: rng.gen_range(-1.0..1.0),
        cover,
        left: Box::new(random_tree(rng, n_features, max_depth - 1, left_cover)),
        right: Box::new(random_tree(rng, n_features, max_depth - 1, right_cover)),
    }
}

/// Random ensemble with valid cover bookkeeping: up to `max_trees` trees of
/// up to `max_depth`, over `n_features` features.
pub fn random_ensemble(
    rng: &mut impl Rng,
    max_trees: usize,
    max_depth: usize,
    n_features: usize,
) -> Ensemble {
    let n_trees = rng.gen_range(1..=max_trees);
    let trees = (0..n_trees)
        .map(|_| {
            let cover = rng.gen_range(20.0..100.0);
            random_tree(rng, n_features, max_depth, cover)
        })
        .collect();
    Ensemble {
        base_score: rng.gen_range(-0.5..0.5),
        trees,
        encoded_names: (0..n_features).map(|i| format!("f{i}")).collect(),
    }
}

/// Brute-force all-pairs KNN imputation over an optional-valued matrix,
/// mirroring the documented contract: masked Euclidean distance over
/// standardized columns with D/|S| scaling, comparison on the scaled
/// squared distance, ties by reference index, donor mean in ascending
/// order, column-mean fallback.
pub fn knn_oracle(
    train: &[Vec<Option<f64>>],
    queries: &[Vec<Option<f64>>],
    k: usize,
) -> Vec<Vec<f64>> {
    let d = train[0].len();
    let mut means = vec![0.0f64; d];
    let mut stds = vec![1.0f64; d];
    for j in 0..d {
        let observed: Vec<f64> = train.iter().filter_map(|r| r[j]).collect();
        let mean = observed.iter().sum::<f64>() / observed.len() as f64;
        let var =
            observed.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / observed.len() as f64;
        means[j] = mean;
        stds[j] = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
    }
    queries
        .iter()
        .map(|q| {
            let mut ranked: Vec<(f64, usize)> = Vec::new();
            for (ri, r) in train.iter().enumerate() {
                let mut sum_sq = 0.0f64;
                let mut overlap = 0usize;
                for j in 0..d {
                    if let (Some(a), Some(b)) = (q[j], r[j]) {
                        let diff = (a - means[j]) / stds[j] - (b - means[j]) / stds[j];
                        sum_sq += diff * diff;
                        overlap += 1;
                    }
                }
                if overlap > 0 {
                    ranked.push((d as f64 / overlap as f64 * sum_sq, ri));
                }
            }
            ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            (0..d)
                .map(|j| match q[j] {
                    Some(v) => v,
                    None => {
                        let mut sum = 0.0;
                        let mut taken = 0usize;
                        for &(_, ri) in &ranked {
                            if let Some(v) = train[ri][j] {
                                sum += v;
                                taken += 1;
                                if taken == k {
                                    break;
                                }
                            }
                        }
                        if taken == 0 {
                            let observed: Vec<f64> = train.iter().filter_map(|r| r[j]).collect();
                            observed.iter().sum::<f64>() / observed.len() as f64
                        } else {
                            sum / taken as f64
                        }
                    }
                })
                .collect()
        })
        .collect()
}
