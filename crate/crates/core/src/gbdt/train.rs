//! Second-order gradient boosting with logistic loss.
//!
//! Split search is exact: candidate thresholds are midpoints between
//! consecutive distinct sorted feature values within a node. Sorted row
//! lists are computed once per tree and partitioned stably on every split,
//! so a node scan costs O(features x rows in node).
//!
//! Determinism: all sampling flows from `hp.seed` through named substreams;
//! the best split is chosen by strictly greater gain with ties broken by
//! lower feature index, then lower threshold.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gbdt::params::{GrowthMode, HyperParams};
use crate::gbdt::tree::{sigmoid, Ensemble, TreeNode};
use crate::matrix::Matrix;
use crate::seed::rng_for_i;

/// Floor for leaf-weight denominators.
const HESSIAN_FLOOR: f64 = 1e-16;

/// Per-round diagnostics captured during training.
#[derive(Debug, Clone)]
pub struct TrainTrace {
    /// Weighted training logloss after each boosting round.
    pub round_logloss: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct SplitCandidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct BuildNode {
    /// Node rows, ascending original index.
    rows: Vec<u32>,
    /// Per sampled feature: node rows sorted by feature value.
    sorted: Vec<Vec<u32>>,
    depth: usize,
    g_sum: f64,
    h_sum: f64,
    cover: f64,
    candidate: Option<SplitCandidate>,
    split: Option<(usize, f64)>,
    children: Option<(usize, usize)>,
}

struct TreeBuilder<'a> {
    cols: &'a [Vec<f64>],
    g: &'a [f64],
    h: &'a [f64],
    w: &'a [f64],
    features: &'a [usize],
    hp: &'a HyperParams,
    nodes: Vec<BuildNode>,
}

impl<'a> TreeBuilder<'a> {
    fn node_stats(&self, rows: &[u32]) -> (f64, f64, f64) {
        let mut g = 0.0;
        let mut h = 0.0;
        let mut cover = 0.0;
        for &r in rows {
            g += self.g[r as usize];
            h += self.h[r as usize];
            cover += self.w[r as usize];
        }
        (g, h, cover)
    }

    /// Exact greedy scan over all sampled features and distinct-value
    /// boundaries. Returns the best admissible candidate, if any.
    fn scan(&self, id: usize) -> Option<SplitCandidate> {
        let node = &self.nodes[id];
        let m = node.rows.len();
        if m < 2 || node.depth >= self.hp.max_depth {
            return None;
        }
        let mcs = self.hp.min_child_samples.max(1);
        if m < 2 * mcs {
            return None;
        }
        let lambda = self.hp.reg_lambda;
        let gamma = self.hp.gamma;
        let parent_term = node.g_sum * node.g_sum / (node.h_sum + lambda);

        let mut best: Option<SplitCandidate> = None;
        for (slot, &feature) in self.features.iter().enumerate() {
            let order = &node.sorted[slot];
            let col = &self.cols[feature];
            if col[order[0] as usize] == col[order[m - 1] as usize] {
                continue; // constant within the node
            }
            let mut gl = 0.0f64;
            let mut hl = 0.0f64;
            for i in 0..m - 1 {
                let r = order[i] as usize;
                gl += self.g[r];
                hl += self.h[r];
                let v = col[r];
                let v_next = col[order[i + 1] as usize];
                if v == v_next {
                    continue;
                }
                let nl = i + 1;
                let nr = m - nl;
                if nl < mcs || nr < mcs {
                    continue;
                }
                let hr = node.h_sum - hl;
                if hl < self.hp.min_child_weight || hr < self.hp.min_child_weight {
                    continue;
                }
                let gr = node.g_sum - gl;
                let gain = 0.5
                    * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_term)
                    - gamma;
                if gain <= 0.0 {
                    continue;
                }
                let mut threshold = 0.5 * (v + v_next);
                if threshold <= v {
                    // adjacent floats: fall back to the right value so that
                    // `x < threshold` reproduces the scan partition
                    threshold = v_next;
                }
                let better = match &best {
                    None => true,
                    Some(b) => {
                        gain > b.gain
                            || (gain == b.gain
                                && (feature < b.feature
                                    || (feature == b.feature && threshold < b.threshold)))
                    }
                };
                if better {
                    best = Some(SplitCandidate {
                        gain,
                        feature,
                        threshold,
                    });
                }
            }
        }
        best
    }

    /// Split node `id` on its stored candidate; returns child ids.
    fn split(&mut self, id: usize) -> (usize, usize) {
        let cand = self.nodes[id].candidate.expect("split without candidate");
        let col = &self.cols[cand.feature];
        let node = &self.nodes[id];

        let mut left_rows = Vec::new();
        let mut right_rows = Vec::new();
        for &r in &node.rows {
            if col[r as usize] < cand.threshold {
                left_rows.push(r);
            } else {
                right_rows.push(r);
            }
        }
        let mut left_sorted = Vec::with_capacity(node.sorted.len());
        let mut right_sorted = Vec::with_capacity(node.sorted.len());
        for list in &node.sorted {
            let mut l = Vec::with_capacity(left_rows.len());
            let mut rr = Vec::with_capacity(right_rows.len());
            for &r in list {
                if col[r as usize] < cand.threshold {
                    l.push(r);
                } else {
                    rr.push(r);
                }
            }
            left_sorted.push(l);
            right_sorted.push(rr);
        }

        let depth = node.depth + 1;
        let (lg, lh, lc) = self.node_stats(&left_rows);
        let (rg, rh, rc) = self.node_stats(&right_rows);
        let left = BuildNode {
            rows: left_rows,
            sorted: left_sorted,
            depth,
            g_sum: lg,
            h_sum: lh,
            cover: lc,
            candidate: None,
            split: None,
            children: None,
        };
        let right = BuildNode {
            rows: right_rows,
            sorted: right_sorted,
            depth,
            g_sum: rg,
            h_sum: rh,
            cover: rc,
            candidate: None,
            split: None,
            children: None,
        };
        let li = self.nodes.len();
        self.nodes.push(left);
        let ri = self.nodes.len();
        self.nodes.push(right);
        let parent = &mut self.nodes[id];
        parent.rows = Vec::new();
        parent.sorted = Vec::new();
        parent.split = Some((cand.feature, cand.threshold));
        parent.children = Some((li, ri));
        (li, ri)
    }

    fn leaf_weight(&self, g: f64, h: f64) -> f64 {
        let shrunk = (g.abs() - self.hp.reg_alpha).max(0.0);
        let denom = (h + self.hp.reg_lambda).max(HESSIAN_FLOOR);
        -g.signum() * shrunk / denom * self.hp.learning_rate
    }

    fn finish(&self, id: usize) -> TreeNode {
        let node = &self.nodes[id];
        match (node.children, node.split) {
            (Some((l, r)), Some((feature, threshold))) => TreeNode::Internal {
                feature,
                threshold,
                cover: node.cover,
                left: Box::new(self.finish(l)),
                right: Box::new(self.finish(r)),
            },
            _ => TreeNode::Leaf {
                weight: self.leaf_weight(node.g_sum, node.h_sum),
                cover: node.cover,
            },
        }
    }
}

/// Max-heap entry for leaf-wise growth: larger gain first, earlier node on
/// ties.
#[derive(PartialEq)]
struct FrontierEntry {
    gain: f64,
    node: usize,
}

impl Eq for FrontierEntry {}

impl PartialOrd for FrontierEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FrontierEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then(other.node.cmp(&self.node))
    }
}

fn build_tree(
    cols: &[Vec<f64>],
    g: &[f64],
    h: &[f64],
    w: &[f64],
    sampled_rows: &[u32],
    features: &[usize],
    global_order: &[Vec<u32>],
    row_mask: Option<&[bool]>,
    hp: &HyperParams,
) -> TreeNode {
    // Root sorted lists: global per-feature order filtered to sampled rows.
    let sorted: Vec<Vec<u32>> = features
        .iter()
        .map(|&f| match row_mask {
            None => global_order[f].clone(),
            Some(mask) => global_order[f]
                .iter()
                .copied()
                .filter(|&r| mask[r as usize])
                .collect(),
        })
        .collect();

    let mut builder = TreeBuilder {
        cols,
        g,
        h,
        w,
        features,
        hp,
        nodes: Vec::new(),
    };
    let (g_sum, h_sum, cover) = {
        let mut gs = 0.0;
        let mut hs = 0.0;
        let mut cv = 0.0;
        for &r in sampled_rows {
            gs += g[r as usize];
            hs += h[r as usize];
            cv += w[r as usize];
        }
        (gs, hs, cv)
    };
    builder.nodes.push(BuildNode {
        rows: sampled_rows.to_vec(),
        sorted,
        depth: 0,
        g_sum,
        h_sum,
        cover,
        candidate: None,
        split: None,
        children: None,
    });

    match hp.growth {
        GrowthMode::DepthWise => {
            let mut queue = std::collections::VecDeque::from([0usize]);
            while let Some(id) = queue.pop_front() {
                if let Some(cand) = builder.scan(id) {
                    builder.nodes[id].candidate = Some(cand);
                    let (l, r) = builder.split(id);
                    queue.push_back(l);
                    queue.push_back(r);
                }
            }
        }
        GrowthMode::LeafWise => {
            let mut heap = std::collections::BinaryHeap::new();
            if let Some(cand) = builder.scan(0) {
                builder.nodes[0].candidate = Some(cand);
                heap.push(FrontierEntry {
                    gain: cand.gain,
                    node: 0,
                });
            }
            let mut n_leaves = 1usize;
            while n_leaves < hp.num_leaves {
                let Some(entry) = heap.pop() else { break };
                let (l, r) = builder.split(entry.node);
                n_leaves += 1;
                for child in [l, r] {
                    if let Some(cand) = builder.scan(child) {
                        builder.nodes[child].candidate = Some(cand);
                        heap.push(FrontierEntry {
                            gain: cand.gain,
                            node: child,
                        });
                    }
                }
            }
        }
    }

    builder.finish(0)
}

fn weighted_logloss(margins: &[f64], y: &[u8], w: &[f64]) -> f64 {
    let mut loss = 0.0;
    let mut wsum = 0.0;
    for ((&m, &label), &wi) in margins.iter().zip(y).zip(w) {
        let p = sigmoid(m).clamp(1e-15, 1.0 - 1e-15);
        loss -= wi * if label == 1 { p.ln() } else { (1.0 - p).ln() };
        wsum += wi;
    }
    loss / wsum
}

/// Train a boosted ensemble, also returning per-round diagnostics.
pub fn train_traced(
    x: &Matrix,
    y: &[u8],
    hp: &HyperParams,
    encoded_names: Vec<String>,
) -> Result<(Ensemble, TrainTrace)> {
    hp.validate()?;
    let n = x.n_rows();
    let n_features = x.n_cols();
    if n != y.len() {
        return Err(Error::Train(format!("{n} rows but {} labels", y.len())));
    }
    if n < 2 {
        return Err(Error::Train(format!("need at least 2 rows, got {n}")));
    }
    if encoded_names.len() != n_features {
        return Err(Error::Train(format!(
            "{} feature names for {n_features} columns",
            encoded_names.len()
        )));
    }
    let n_pos = y.iter().filter(|&&l| l == 1).count();
    if n_pos == 0 || n_pos == n {
        return Err(Error::Train("labels are single-class".into()));
    }
    for row in x.iter_rows() {
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Train(format!("non-finite feature value {bad}")));
        }
    }

    let w: Vec<f64> = y
        .iter()
        .map(|&l| if l == 1 { hp.scale_pos_weight } else { 1.0 })
        .collect();
    let wsum: f64 = w.iter().sum();
    let wpos: f64 = hp.scale_pos_weight * n_pos as f64;
    let p_bar = wpos / wsum;
    let base_score = (p_bar / (1.0 - p_bar)).ln();

    let cols = x.to_columns();
    // Global argsort per feature, reused by every tree.
    let global_order: Vec<Vec<u32>> = cols
        .iter()
        .map(|col| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| {
                col[a as usize]
                    .total_cmp(&col[b as usize])
                    .then(a.cmp(&b))
            });
            idx
        })
        .collect();

    let all_features: Vec<usize> = (0..n_features).collect();
    let all_rows: Vec<u32> = (0..n as u32).collect();
    let n_sampled_rows = ((hp.subsample * n as f64).round() as usize).clamp(1, n);
    let n_sampled_feats = ((hp.colsample_bytree * n_features as f64).round() as usize)
        .clamp(1, n_features);

    let mut margins = vec![base_score; n];
    let mut g = vec![0.0f64; n];
    let mut h = vec![0.0f64; n];
    let mut trees = Vec::with_capacity(hp.n_estimators);
    let mut trace = TrainTrace {
        round_logloss: Vec::with_capacity(hp.n_estimators),
    };

    for round in 0..hp.n_estimators {
        for i in 0..n {
            let p = sigmoid(margins[i]);
            g[i] = w[i] * (p - f64::from(y[i]));
            h[i] = w[i] * p * (1.0 - p);
        }

        let mut rng = rng_for_i(hp.seed, "round", round as u64);
        let (sampled_rows, row_mask) = if n_sampled_rows < n {
            let mut picked = sample_without_replacement(&mut rng, n, n_sampled_rows);
            picked.sort_unstable();
            let mut mask = vec![false; n];
            for &r in &picked {
                mask[r as usize] = true;
            }
            (picked, Some(mask))
        } else {
            (all_rows.clone(), None)
        };
        let features = if n_sampled_feats < n_features {
            let mut picked = sample_without_replacement(&mut rng, n_features, n_sampled_feats);
            picked.sort_unstable();
            picked.into_iter().map(|f| f as usize).collect()
        } else {
            all_features.clone()
        };

        let tree = build_tree(
            &cols,
            &g,
            &h,
            &w,
            &sampled_rows,
            &features,
            &global_order,
            row_mask.as_deref(),
            hp,
        );
        for (i, m) in margins.iter_mut().enumerate() {
            *m += tree.predict(x.row(i));
        }
        trace.round_logloss.push(weighted_logloss(&margins, y, &w));
        trees.push(tree);
    }

    Ok((
        Ensemble {
            base_score,
            trees,
            encoded_names,
        },
        trace,
    ))
}

/// Train a boosted ensemble.
pub fn train(x: &Matrix, y: &[u8], hp: &HyperParams, encoded_names: Vec<String>) -> Result<Ensemble> {
    train_traced(x, y, hp, encoded_names).map(|(e, _)| e)
}

/// k distinct values from 0..n by partial Fisher-Yates; order unspecified.
fn sample_without_replacement(rng: &mut impl Rng, n: usize, k: usize) -> Vec<u32> {
    debug_assert!(k <= n);
    let mut pool: Vec<u32> = (0..n as u32).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
