//! Exact per-prediction Shapley attribution for tree ensembles.
//!
//! `shap_values` runs the polynomial-time path algorithm: conditional
//! expectations follow the instance for features already on the decision
//! path and average branches by cover proportion for the rest. `shap_oracle`
//! evaluates the exponential-time Shapley definition over the same
//! cover-weighted traversal; it exists to verify the fast path and is
//! limited to 20 features.
//!
//! Attributions are in margin (log-odds) units: the efficiency axiom
//! `base_value + sum(phi) = margin(x)` only holds additively there.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gbdt::{Ensemble, TreeNode};
use crate::matrix::Matrix;

/// Tolerance for the efficiency axiom, enforced on every sample.
pub const EFFICIENCY_TOL: f64 = 1e-8;

/// Per-sample, per-feature attributions plus the shared base value
/// (expected margin under the cover distribution).
#[derive(Debug, Clone)]
pub struct ShapMatrix {
    pub base_value: f64,
    pub values: Matrix,
}

#[derive(Debug, Clone, Copy, Default)]
struct PathElement {
    feature: usize,
    zero_fraction: f64,
    one_fraction: f64,
    pweight: f64,
}

/// The growing unique-feature path of the traversal.
#[derive(Debug, Clone, Default)]
struct Path {
    elements: Vec<PathElement>,
}

impl Path {
    fn extend(&mut self, depth: usize, zero_fraction: f64, one_fraction: f64, feature: usize) {
        if depth == self.elements.len() {
            self.elements.push(PathElement::default());
        }
        self.elements[depth] = PathElement {
            feature,
            zero_fraction,
            one_fraction,
            pweight: if depth == 0 { 1.0 } else { 0.0 },
        };
        for i in (0..depth).rev() {
            self.elements[i + 1].pweight +=
                one_fraction * self.elements[i].pweight * (i + 1) as f64 / (depth + 1) as f64;
            self.elements[i].pweight =
                zero_fraction * self.elements[i].pweight * (depth - i) as f64 / (depth + 1) as f64;
        }
    }

    fn unwind(&mut self, depth: usize, index: usize) {
        let one_fraction = self.elements[index].one_fraction;
        let zero_fraction = self.elements[index].zero_fraction;
        let mut next_one = self.elements[depth].pweight;
        for i in (0..depth).rev() {
            if one_fraction != 0.0 {
                let tmp = self.elements[i].pweight;
                self.elements[i].pweight =
                    next_one * (depth + 1) as f64 / ((i + 1) as f64 * one_fraction);
                next_one = tmp
                    - self.elements[i].pweight * zero_fraction * (depth - i) as f64
                        / (depth + 1) as f64;
            } else {
                self.elements[i].pweight = self.elements[i].pweight * (depth + 1) as f64
                    / (zero_fraction * (depth - i) as f64);
            }
        }
        for i in index..depth {
            self.elements[i].feature = self.elements[i + 1].feature;
            self.elements[i].zero_fraction = self.elements[i + 1].zero_fraction;
            self.elements[i].one_fraction = self.elements[i + 1].one_fraction;
        }
    }

    fn unwound_sum(&self, depth: usize, index: usize) -> f64 {
        let one_fraction = self.elements[index].one_fraction;
        let zero_fraction = self.elements[index].zero_fraction;
        let mut next_one = self.elements[depth].pweight;
        let mut total = 0.0;
        for i in (0..depth).rev() {
            if one_fraction != 0.0 {
                let tmp = next_one * (depth + 1) as f64 / ((i + 1) as f64 * one_fraction);
                total += tmp;
                next_one = self.elements[i].pweight
                    - tmp * zero_fraction * (depth - i) as f64 / (depth + 1) as f64;
            } else {
                total += self.elements[i].pweight / zero_fraction * (depth + 1) as f64
                    / (depth - i) as f64;
            }
        }
        total
    }
}

const ROOT_FEATURE: usize = usize::MAX;

#[allow(clippy::too_many_arguments)]
fn tree_shap(
    node: &TreeNode,
    row: &[f64],
    phi: &mut [f64],
    mut path: Path,
    mut depth: usize,
    parent_zero: f64,
    parent_one: f64,
    parent_feature: usize,
) {
    path.extend(depth, parent_zero, parent_one, parent_feature);
    match node {
        TreeNode::Leaf { weight, .. } => {
            for i in 1..=depth {
                let w = path.unwound_sum(depth, i);
                let el = path.elements[i];
                phi[el.feature] += w * (el.one_fraction - el.zero_fraction) * weight;
            }
        }
        TreeNode::Internal {
            feature,
            threshold,
            cover,
            left,
            right,
        } => {
            let (hot, cold) = if row[*feature] < *threshold {
                (left, right)
            } else {
                (right, left)
            };
            let mut incoming_zero = 1.0;
            let mut incoming_one = 1.0;
            // A feature met again on the path is unwound first so its
            // fractions multiply instead of stacking.
            if let Some(i) = path.elements[..=depth]
                .iter()
                .position(|el| el.feature == *feature)
            {
                incoming_zero = path.elements[i].zero_fraction;
                incoming_one = path.elements[i].one_fraction;
                path.unwind(depth, i);
                depth -= 1;
            }
            let hot_zero = hot.cover() / cover * incoming_zero;
            let cold_zero = cold.cover() / cover * incoming_zero;
            tree_shap(
                hot,
                row,
                phi,
                path.clone(),
                depth + 1,
                hot_zero,
                incoming_one,
                *feature,
            );
            tree_shap(cold, row, phi, path, depth + 1, cold_zero, 0.0, *feature);
        }
    }
}

fn check_covers(node: &TreeNode) -> Result<()> {
    match node {
        TreeNode::Leaf { cover, .. } => {
            if *cover > 0.0 {
                Ok(())
            } else {
                Err(Error::Shap(format!("non-positive leaf cover {cover}")))
            }
        }
        TreeNode::Internal {
            cover, left, right, ..
        } => {
            if *cover <= 0.0 {
                return Err(Error::Shap(format!("non-positive node cover {cover}")));
            }
            check_covers(left)?;
            check_covers(right)
        }
    }
}

fn validate_ensemble(ens: &Ensemble, n_cols: usize) -> Result<()> {
    if n_cols != ens.n_features() {
        return Err(Error::Shap(format!(
            "input has {n_cols} features, model expects {}",
            ens.n_features()
        )));
    }
    for t in &ens.trees {
        check_covers(t)?;
        if let Some(f) = t.max_feature() {
            if f >= ens.n_features() {
                return Err(Error::Shap(format!(
                    "tree references feature {f}, model has {}",
                    ens.n_features()
                )));
            }
        }
    }
    Ok(())
}

fn shap_row(ens: &Ensemble, row: &[f64]) -> Vec<f64> {
    let mut phi = vec![0.0f64; ens.n_features() + 1];
    for tree in &ens.trees {
        tree_shap(tree, row, &mut phi, Path::default(), 0, 1.0, 1.0, ROOT_FEATURE);
    }
    phi.truncate(ens.n_features());
    phi
}

/// Attributions for every row of `x`, with the efficiency axiom enforced at
/// `EFFICIENCY_TOL` on each sample.
pub fn shap_values(ens: &Ensemble, x: &Matrix) -> Result<ShapMatrix> {
    validate_ensemble(ens, x.n_cols())?;
    let base_value = ens.expected_margin();
    let rows: Vec<Vec<f64>> = (0..x.n_rows())
        .into_par_iter()
        .map(|r| shap_row(ens, x.row(r)))
        .collect();
    for (r, phi) in rows.iter().enumerate() {
        let margin = ens.margin_row(x.row(r));
        let reconstructed = base_value + phi.iter().sum::<f64>();
        if (reconstructed - margin).abs() > EFFICIENCY_TOL {
            return Err(Error::Shap(format!(
                "efficiency violated on row {r}: base + sum(phi) = {reconstructed}, margin = {margin}"
            )));
        }
    }
    Ok(ShapMatrix {
        base_value,
        values: Matrix::from_rows(&rows)?,
    })
}

fn subset_value(node: &TreeNode, row: &[f64], mask: u64) -> f64 {
    match node {
        TreeNode::Leaf { weight, .. } => *weight,
        TreeNode::Internal {
            feature,
            threshold,
            cover,
            left,
            right,
        } => {
            if mask & (1u64 << feature) != 0 {
                if row[*feature] < *threshold {
                    subset_value(left, row, mask)
                } else {
                    subset_value(right, row, mask)
                }
            } else {
                (left.cover() * subset_value(left, row, mask)
                    + right.cover() * subset_value(right, row, mask))
                    / cover
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut num = 1.0f64;
    let mut den = 1.0f64;
    for i in 0..k {
        num *= (n - i) as f64;
        den *= (i + 1) as f64;
    }
    num / den
}

/// Exponential-time Shapley attribution by subset enumeration over the same
/// cover-weighted conditional expectation the fast path uses. Limited to 20
/// features (cost 2^n).
pub fn shap_oracle(ens: &Ensemble, row: &[f64]) -> Result<Vec<f64>> {
    validate_ensemble(ens, row.len())?;
    let n = ens.n_features();
    if n == 0 {
        return Err(Error::Shap("model has no features".into()));
    }
    if n > 20 {
        return Err(Error::Shap(format!(
            "oracle limited to 20 features, model has {n}"
        )));
    }

    // v(S) for every subset, shared across the per-feature sums.
    let n_masks = 1usize << n;
    let mut v = vec![0.0f64; n_masks];
    for (mask, slot) in v.iter_mut().enumerate() {
        let mut total = ens.base_score;
        for tree in &ens.trees {
            total += subset_value(tree, row, mask as u64);
        }
        *slot = total;
    }

    // weight(|S|) = |S|! (n - |S| - 1)! / n! = 1 / (n * C(n-1, |S|))
    let weights: Vec<f64> = (0..n)
        .map(|s| 1.0 / (n as f64 * binomial(n - 1, s)))
        .collect();

    let mut phi = vec![0.0f64; n];
    for mask in 0..n_masks {
        let size = (mask as u64).count_ones() as usize;
        for (j, p) in phi.iter_mut().enumerate() {
            if mask & (1 << j) == 0 {
                *p += weights[size] * (v[mask | (1 << j)] - v[mask]);
            }
        }
    }
    Ok(phi)
}

/// Encoded features ordered by mean absolute attribution, descending;
/// ties keep the lower feature index first.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FeatureRanking {
    /// (encoded feature name, mean |SHAP| score), non-increasing in score.
    pub entries: Vec<(String, f64)>,
}

impl FeatureRanking {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn top(&self, n: usize) -> impl Iterator<Item = &str> {
        self.entries.iter().take(n).map(|(n, _)| n.as_str())
    }
}

/// Rank features by mean |SHAP| over the sample set.
pub fn rank_features(shap: &ShapMatrix, names: &[String]) -> Result<FeatureRanking> {
    let m = &shap.values;
    if m.n_rows() == 0 || m.n_cols() == 0 {
        return Err(Error::Shap("cannot rank features of an empty matrix".into()));
    }
    if names.len() != m.n_cols() {
        return Err(Error::Shap(format!(
            "{} names for {} attribution columns",
            names.len(),
            m.n_cols()
        )));
    }
    let n = m.n_rows() as f64;
    let mut scores = vec![0.0f64; m.n_cols()];
    for row in m.iter_rows() {
        for (s, v) in scores.iter_mut().zip(row) {
            *s += v.abs();
        }
    }
    for s in &mut scores {
        *s /= n;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    Ok(FeatureRanking {
        entries: order
            .into_iter()
            .map(|i| (names[i].clone(), scores[i]))
            .collect(),
    })
}

/// Write the SHAP export: optional stamp comment, then one row per sample
/// with the base value first and one column per encoded feature.
pub fn write_shap_csv(
    shap: &ShapMatrix,
    names: &[String],
    out: &mut impl std::io::Write,
    stamp: Option<&str>,
) -> Result<()> {
    let werr = |e: std::io::Error| Error::Shap(format!("write shap export: {e}"));
    if let Some(s) = stamp {
        writeln!(out, "# {s}").map_err(werr)?;
    }
    let mut header = vec!["base_value".to_string()];
    header.extend(names.iter().cloned());
    writeln!(out, "{}", header.join(",")).map_err(werr)?;
    for row in shap.values.iter_rows() {
        let mut fields = vec![format!("{}", shap.base_value)];
        fields.extend(row.iter().map(|v| format!("{v}")));
        writeln!(out, "{}", fields.join(",")).map_err(werr)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::{train, HyperParams};

    fn stump(feature: usize, threshold: f64, lw: f64, rw: f64, lc: f64, rc: f64) -> TreeNode {
        TreeNode::Internal {
            feature,
            threshold,
            cover: lc + rc,
            left: Box::new(TreeNode::Leaf {
                weight: lw,
                cover: lc,
            }),
            right: Box::new(TreeNode::Leaf {
                weight: rw,
                cover: rc,
            }),
        }
    }

    fn ens(trees: Vec<TreeNode>, n_features: usize) -> Ensemble {
        Ensemble {
            base_score: 0.0,
            trees,
            encoded_names: (0..n_features).map(|i| format!("f{i}")).collect(),
        }
    }

    #[test]
    fn balanced_stump_attribution() {
        let e = ens(vec![stump(0, 0.5, -1.0, 1.0, 50.0, 50.0)], 3);
        let x = Matrix::from_rows(&[vec![1.0, 9.0, -4.0]]).unwrap();
        let s = shap_values(&e, &x).unwrap();
        assert!(s.base_value.abs() < 1e-12);
        assert!((s.values.get(0, 0) - 1.0).abs() < 1e-12);
        assert_eq!(s.values.get(0, 1), 0.0);
        assert_eq!(s.values.get(0, 2), 0.0);
    }

    #[test]
    fn unused_feature_gets_exact_zero() {
        let e = ens(
            vec![
                stump(0, 0.0, -0.5, 0.5, 30.0, 70.0),
                stump(2, 1.0, 0.2, -0.3, 60.0, 40.0),
            ],
            4,
        );
        let x = Matrix::from_rows(&[vec![0.3, 123.0, 2.0, -7.0], vec![-1.0, 0.0, 0.0, 7.0]])
            .unwrap();
        let s = shap_values(&e, &x).unwrap();
        for r in 0..2 {
            assert_eq!(s.values.get(r, 1), 0.0);
            assert_eq!(s.values.get(r, 3), 0.0);
        }
    }

    #[test]
    fn additive_across_trees() {
        let t1 = stump(0, 0.0, -0.5, 0.5, 30.0, 70.0);
        let t2 = stump(1, 1.0, 0.7, -0.1, 10.0, 90.0);
        let both = ens(vec![t1.clone(), t2.clone()], 2);
        let only1 = ens(vec![t1], 2);
        let only2 = ens(vec![t2], 2);
        let x = Matrix::from_rows(&[vec![0.4, 0.9], vec![-2.0, 3.0]]).unwrap();
        let sb = shap_values(&both, &x).unwrap();
        let s1 = shap_values(&only1, &x).unwrap();
        let s2 = shap_values(&only2, &x).unwrap();
        assert!((sb.base_value - (s1.base_value + s2.base_value)).abs() < 1e-10);
        for r in 0..2 {
            for c in 0..2 {
                let sum = s1.values.get(r, c) + s2.values.get(r, c);
                assert!((sb.values.get(r, c) - sum).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn oracle_single_feature_is_margin_minus_base() {
        let e = ens(vec![stump(0, 0.0, -2.0, 1.0, 25.0, 75.0)], 1);
        let phi = shap_oracle(&e, &[0.5]).unwrap();
        let margin = e.margin_row(&[0.5]);
        let base = e.expected_margin();
        assert!((phi[0] - (margin - base)).abs() < 1e-12);
    }

    #[test]
    fn oracle_symmetry() {
        // one stump on each feature with identical geometry
        let e = ens(
            vec![
                stump(0, 0.0, -1.0, 1.0, 50.0, 50.0),
                stump(1, 0.0, -1.0, 1.0, 50.0, 50.0),
            ],
            2,
        );
        let phi = shap_oracle(&e, &[1.0, 1.0]).unwrap();
        assert!((phi[0] - phi[1]).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_wide_models() {
        let e = ens(vec![], 21);
        assert!(shap_oracle(&e, &vec![0.0; 21]).is_err());
    }

    #[test]
    fn fast_path_matches_oracle_on_trained_model() {
        use rand::Rng;
        let mut rng = crate::seed::rng_from(77);
        let n = 120;
        let d = 5;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<u8> = rows
            .iter()
            .map(|r| u8::from(r[0] - 0.5 * r[2] + 0.2 * r[4] > 0.0))
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let hp = HyperParams {
            n_estimators: 10,
            max_depth: 3,
            ..HyperParams::default()
        };
        let names = (0..d).map(|i| format!("f{i}")).collect();
        let model = train(&x, &y, &hp, names).unwrap();
        let queries = Matrix::from_rows(&rows[..10]).unwrap();
        let fast = shap_values(&model, &queries).unwrap();
        for r in 0..queries.n_rows() {
            let slow = shap_oracle(&model, queries.row(r)).unwrap();
            for c in 0..d {
                assert!(
                    (fast.values.get(r, c) - slow[c]).abs() < 1e-9,
                    "row {r} feature {c}: fast {} vs oracle {}",
                    fast.values.get(r, c),
                    slow[c]
                );
            }
        }
    }

    #[test]
    fn ranking_orders_by_mean_abs() {
        let shap = ShapMatrix {
            base_value: 0.0,
            values: Matrix::from_rows(&[vec![1.0, 0.0, -3.0], vec![-1.0, 0.0, 1.0]]).unwrap(),
        };
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let r = rank_features(&shap, &names).unwrap();
        assert_eq!(r.entries[0], ("c".to_string(), 2.0));
        assert_eq!(r.entries[1], ("a".to_string(), 1.0));
        assert_eq!(r.entries[2], ("b".to_string(), 0.0));
    }

    #[test]
    fn ranking_single_feature_mean_of_magnitudes() {
        let shap = ShapMatrix {
            base_value: 0.0,
            values: Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap(),
        };
        let r = rank_features(&shap, &["only".to_string()]).unwrap();
        assert_eq!(r.entries[0].1, 1.0);
    }

    #[test]
    fn ranking_rejects_empty() {
        let shap = ShapMatrix {
            base_value: 0.0,
            values: Matrix::zeros(0, 0),
        };
        assert!(rank_features(&shap, &[]).is_err());
    }
}
