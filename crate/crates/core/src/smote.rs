//! SMOTE synthetic oversampling of the minority class.
//!
//! Operates in encoded feature space, which means indicator coordinates of
//! synthetic rows may be fractional; tree splits handle that. Parents are
//! chosen round-robin over the minority rows in their original order,
//! neighbors uniformly among the k nearest minority rows (Euclidean, ties by
//! index), and the interpolation factor is uniform in [0, 1).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::rng_from;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    /// Minority neighbors considered per parent; clamped to
    /// `minority_count - 1` when larger (recorded in the audit).
    pub k_neighbors: usize,
    /// Desired minority/majority ratio after resampling.
    pub target_ratio: f64,
    /// Stream seed. Callers running SMOTE inside cross-validation derive a
    /// per-fold seed instead; see the pipeline module.
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            target_ratio: 1.0,
            seed: 0,
        }
    }
}

/// Provenance of one synthetic row: row indices into the input matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticOrigin {
    pub parent: usize,
    pub neighbor: usize,
    pub lambda: f64,
}

/// What SMOTE did: counts, the effective neighbor count, and per-synthetic
/// provenance for geometry verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoteAudit {
    pub minority_label: u8,
    pub n_minority: usize,
    pub n_majority: usize,
    pub n_synthetic: usize,
    pub k_used: usize,
    pub k_clamped: bool,
    pub origins: Vec<SyntheticOrigin>,
}

/// Append synthetic minority rows until the minority/majority ratio reaches
/// the target. Original rows are untouched; synthetic rows are appended
/// after them in generation order.
pub fn smote(x: &Matrix, y: &[u8], cfg: &SmoteConfig) -> Result<(Matrix, Vec<u8>, SmoteAudit)> {
    if x.n_rows() != y.len() {
        return Err(Error::Smote(format!(
            "{} rows but {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    if cfg.k_neighbors == 0 {
        return Err(Error::Smote("k_neighbors must be at least 1".into()));
    }
    if !(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0) {
        return Err(Error::Smote(format!(
            "target_ratio must be in (0, 1], got {}",
            cfg.target_ratio
        )));
    }
    let n_pos = y.iter().filter(|&&l| l == 1).count();
    let n_neg = y.len() - n_pos;
    let minority_label: u8 = if n_pos <= n_neg { 1 } else { 0 };
    let (n_min, n_maj) = if minority_label == 1 {
        (n_pos, n_neg)
    } else {
        (n_neg, n_pos)
    };
    if n_min < 2 {
        return Err(Error::Smote(format!(
            "minority class has {n_min} samples; need at least 2"
        )));
    }

    let target = (cfg.target_ratio * n_maj as f64).ceil() as usize;
    let n_syn = target.saturating_sub(n_min);

    let minority_rows: Vec<usize> = y
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == minority_label)
        .map(|(i, _)| i)
        .collect();

    let k_used = cfg.k_neighbors.min(n_min - 1);
    let k_clamped = k_used != cfg.k_neighbors;

    let mut audit = SmoteAudit {
        minority_label,
        n_minority: n_min,
        n_majority: n_maj,
        n_synthetic: n_syn,
        k_used,
        k_clamped,
        origins: Vec::with_capacity(n_syn),
    };

    let mut out_x = x.clone();
    let mut out_y = y.to_vec();
    if n_syn == 0 {
        return Ok((out_x, out_y, audit));
    }

    // k nearest minority neighbors per minority row, ties by index.
    let neighbors: Vec<Vec<usize>> = minority_rows
        .iter()
        .map(|&i| {
            let mut d: Vec<(f64, usize)> = minority_rows
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| {
                    let ss: f64 = x
                        .row(i)
                        .iter()
                        .zip(x.row(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (ss, j)
                })
                .collect();
            d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            d.into_iter().take(k_used).map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = rng_from(cfg.seed);
    let mut row_buf = vec![0.0f64; x.n_cols()];
    for s in 0..n_syn {
        let pi = s % minority_rows.len();
        let parent = minority_rows[pi];
        let neighbor = neighbors[pi][rng.gen_range(0..k_used)];
        let lambda: f64 = rng.gen::<f64>();
        for (c, slot) in row_buf.iter_mut().enumerate() {
            let p = x.get(parent, c);
            let q = x.get(neighbor, c);
            *slot = p + lambda * (q - p);
        }
        out_x.push_row(&row_buf);
        out_y.push(minority_label);
        audit.origins.push(SyntheticOrigin {
            parent,
            neighbor,
            lambda,
        });
    }

    Ok((out_x, out_y, audit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(k: usize, ratio: f64, seed: u64) -> SmoteConfig {
        SmoteConfig {
            k_neighbors: k,
            target_ratio: ratio,
            seed,
        }
    }

    #[test]
    fn segment_geometry_on_two_points() {
        // minority {(0,0),(1,1)}: every synthetic point is (lambda, lambda)
        let x = Matrix::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![5.0, 5.0],
            vec![6.0, 5.0],
            vec![7.0, 5.0],
            vec![8.0, 5.0],
        ])
        .unwrap();
        let y = vec![1, 1, 0, 0, 0, 0];
        let (xs, ys, audit) = smote(&x, &y, &cfg(1, 1.0, 7)).unwrap();
        assert_eq!(audit.n_synthetic, 2);
        assert_eq!(ys.len(), 8);
        for s in 0..audit.n_synthetic {
            let row = xs.row(6 + s);
            assert_eq!(row[0], row[1]);
            assert!((0.0..1.0).contains(&row[0]));
        }
    }

    #[test]
    fn duplicated_minority_points_synthesize_in_place() {
        let x = Matrix::from_rows(&[
            vec![2.5, -1.0],
            vec![2.5, -1.0],
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let y = vec![1, 1, 0, 0, 0, 0];
        let (xs, _, audit) = smote(&x, &y, &cfg(3, 1.0, 11)).unwrap();
        assert!(audit.k_clamped);
        assert_eq!(audit.k_used, 1);
        for s in 0..audit.n_synthetic {
            assert_eq!(xs.row(6 + s), &[2.5, -1.0]);
        }
    }

    #[test]
    fn counts_hit_target_formula() {
        // 591 majority vs 201 minority at ratio 1.0 inside a training fold
        let n_maj = 591;
        let n_min = 201;
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n_maj {
            rows.push(vec![i as f64, 0.0]);
            y.push(0u8);
        }
        for i in 0..n_min {
            rows.push(vec![i as f64, 10.0]);
            y.push(1u8);
        }
        let x = Matrix::from_rows(&rows).unwrap();
        let (_, ys, audit) = smote(&x, &y, &cfg(5, 1.0, 3)).unwrap();
        assert_eq!(audit.n_synthetic, n_maj - n_min);
        assert_eq!(ys.iter().filter(|&&l| l == 1).count(), n_maj);
        assert_eq!(ys.iter().filter(|&&l| l == 0).count(), n_maj);
    }

    #[test]
    fn no_synthesis_when_target_met() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let y = vec![0, 0, 1, 1];
        let (xs, ys, audit) = smote(&x, &y, &cfg(1, 1.0, 0)).unwrap();
        assert_eq!(audit.n_synthetic, 0);
        assert_eq!(xs.n_rows(), 4);
        assert_eq!(ys, y);
    }

    #[test]
    fn deterministic_for_seed() {
        let x = Matrix::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.5],
            vec![0.5, 1.0],
            vec![5.0, 5.0],
            vec![6.0, 6.0],
            vec![7.0, 7.0],
            vec![8.0, 8.0],
            vec![9.0, 9.0],
        ])
        .unwrap();
        let y = vec![1, 1, 1, 0, 0, 0, 0, 0];
        let a = smote(&x, &y, &cfg(2, 1.0, 42)).unwrap();
        let b = smote(&x, &y, &cfg(2, 1.0, 42)).unwrap();
        assert_eq!(a.0, b.0);
        let c = smote(&x, &y, &cfg(2, 1.0, 43)).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn single_minority_sample_rejected() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let y = vec![1, 0, 0];
        assert!(smote(&x, &y, &cfg(1, 1.0, 0)).is_err());
    }

    proptest! {
        #[test]
        fn synthetic_rows_lie_on_recorded_segments(
            seed in 0u64..1000,
            n_min in 2usize..8,
            n_maj in 8usize..20,
            k in 1usize..6,
        ) {
            let mut rng = crate::seed::rng_from(seed);
            use rand::Rng;
            let dim = 3;
            let mut rows = Vec::new();
            let mut y = Vec::new();
            for _ in 0..n_maj {
                rows.push((0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect::<Vec<_>>());
                y.push(0u8);
            }
            for _ in 0..n_min {
                rows.push((0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect::<Vec<_>>());
                y.push(1u8);
            }
            let x = Matrix::from_rows(&rows).unwrap();
            let (xs, ys, audit) = smote(&x, &y, &cfg(k, 1.0, seed)).unwrap();
            prop_assert_eq!(audit.n_synthetic, n_maj - n_min);
            prop_assert_eq!(ys.iter().filter(|&&l| l == 1).count(), n_maj);

            // majority rows bit-identical, synthetic rows on their segments
            for r in 0..x.n_rows() {
                prop_assert_eq!(x.row(r), xs.row(r));
            }
            let mins: Vec<f64> = (0..dim).map(|c| {
                (0..x.n_rows()).filter(|&r| y[r] == 1).map(|r| x.get(r, c)).fold(f64::INFINITY, f64::min)
            }).collect();
            let maxs: Vec<f64> = (0..dim).map(|c| {
                (0..x.n_rows()).filter(|&r| y[r] == 1).map(|r| x.get(r, c)).fold(f64::NEG_INFINITY, f64::max)
            }).collect();
            for (s, origin) in audit.origins.iter().enumerate() {
                let row = xs.row(x.n_rows() + s);
                prop_assert!((0.0..1.0).contains(&origin.lambda));
                for c in 0..dim {
                    let p = x.get(origin.parent, c);
                    let q = x.get(origin.neighbor, c);
                    let expect = p + origin.lambda * (q - p);
                    prop_assert!((row[c] - expect).abs() <= 1e-12);
                    prop_assert!(row[c] >= mins[c] && row[c] <= maxs[c]);
                }
            }
        }
    }
}
