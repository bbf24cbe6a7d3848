//! Standardization of numeric features and one-hot expansion of
//! categoricals, fitted on training data only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::table::{ColumnData, ColumnKind, ColumnRole, DataTable};

/// Guard against zero standard deviation; constant columns encode to zero.
pub const STDEV_EPSILON: f64 = 1e-12;

/// A fully imputed view of the feature columns of a table: no missing
/// cells, split by kind. Produced by the imputers (or directly from a
/// complete table) and consumed by the encoder.
#[derive(Debug, Clone)]
pub struct ImputedBlock {
    /// (column name, values) per numeric feature, in schema order.
    pub numeric: Vec<(String, Vec<f64>)>,
    /// (column name, symbols) per categorical feature, in schema order.
    pub categorical: Vec<(String, Vec<String>)>,
    pub n_rows: usize,
}

impl ImputedBlock {
    /// Build directly from a table with no missing feature cells.
    /// A missing cell is an imputation-contract violation and errors.
    pub fn from_table(table: &DataTable, rows: &[usize]) -> Result<Self> {
        let mut numeric = Vec::new();
        let mut categorical = Vec::new();
        for (ci, cs) in table.schema().iter().enumerate() {
            if cs.role != ColumnRole::Feature {
                continue;
            }
            match table.column(ci) {
                ColumnData::Numeric(v) => {
                    let mut out = Vec::with_capacity(rows.len());
                    for &r in rows {
                        out.push(v[r].ok_or_else(|| {
                            Error::Encode(format!(
                                "missing cell in numeric column '{}' (row {}); impute first",
                                cs.name, r
                            ))
                        })?);
                    }
                    numeric.push((cs.name.clone(), out));
                }
                ColumnData::Categorical(v) => {
                    let mut out = Vec::with_capacity(rows.len());
                    for &r in rows {
                        out.push(v[r].clone().ok_or_else(|| {
                            Error::Encode(format!(
                                "missing cell in categorical column '{}' (row {}); impute first",
                                cs.name, r
                            ))
                        })?);
                    }
                    categorical.push((cs.name.clone(), out));
                }
            }
        }
        Ok(ImputedBlock {
            numeric,
            categorical,
            n_rows: rows.len(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NumericStat {
    name: String,
    mean: f64,
    /// Population standard deviation, floored at `STDEV_EPSILON`.
    stdev: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CategoricalLevels {
    name: String,
    /// Observed training levels, sorted lexicographically.
    levels: Vec<String>,
}

/// Fitted feature encoder: per-numeric standardization statistics and
/// per-categorical level inventories. Encoded feature order is: numeric
/// columns in schema order, then each categorical column in schema order
/// expanded to one indicator per observed level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Encoder {
    numeric: Vec<NumericStat>,
    categorical: Vec<CategoricalLevels>,
    /// Output feature names: the column name for numerics,
    /// `name=level` for indicators.
    encoded_names: Vec<String>,
    /// For each encoded feature, the index of its source column within the
    /// fitted block (numeric index or categorical index, disambiguated by
    /// `origin_kind`).
    origins: Vec<(ColumnKind, usize)>,
}

impl Encoder {
    pub fn encoded_names(&self) -> &[String] {
        &self.encoded_names
    }

    pub fn n_encoded(&self) -> usize {
        self.encoded_names.len()
    }

    /// Name of the source column behind an encoded feature. Indicators of
    /// one categorical column share a source name; that grouping drives the
    /// optional aggregated selection mode.
    pub fn source_column(&self, encoded_idx: usize) -> &str {
        match self.origins[encoded_idx] {
            (ColumnKind::Numeric, i) => &self.numeric[i].name,
            (ColumnKind::Categorical, i) => &self.categorical[i].name,
        }
    }

    /// All encoded feature indices that share the source column of
    /// `encoded_idx`.
    pub fn group_of(&self, encoded_idx: usize) -> Vec<usize> {
        let origin = self.origins[encoded_idx];
        match origin.0 {
            ColumnKind::Numeric => vec![encoded_idx],
            ColumnKind::Categorical => self
                .origins
                .iter()
                .enumerate()
                .filter(|(_, o)| **o == origin)
                .map(|(i, _)| i)
                .collect(),
        }
    }
}

fn population_stdev(values: &[f64], mean: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / values.len() as f64).sqrt()
}

/// Fit standardization statistics and categorical level inventories on a
/// training block. Level order is lexicographic so `encoded_names` does not
/// depend on row order.
pub fn fit_encoder(train: &ImputedBlock) -> Result<Encoder> {
    if train.n_rows == 0 {
        return Err(Error::Encode("cannot fit encoder on zero rows".into()));
    }
    let mut numeric = Vec::new();
    let mut categorical = Vec::new();
    for (name, values) in &train.numeric {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Encode(format!(
                "non-finite value {bad} in numeric column '{name}'"
            )));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let stdev = population_stdev(values, mean).max(STDEV_EPSILON);
        numeric.push(NumericStat {
            name: name.clone(),
            mean,
            stdev,
        });
    }
    for (name, symbols) in &train.categorical {
        let mut levels: Vec<String> = symbols.to_vec();
        levels.sort_unstable();
        levels.dedup();
        categorical.push(CategoricalLevels {
            name: name.clone(),
            levels,
        });
    }

    let mut encoded_names = Vec::new();
    let mut origins = Vec::new();
    for (i, stat) in numeric.iter().enumerate() {
        encoded_names.push(stat.name.clone());
        origins.push((ColumnKind::Numeric, i));
    }
    for (i, lv) in categorical.iter().enumerate() {
        for level in &lv.levels {
            encoded_names.push(format!("{}={}", lv.name, level));
            origins.push((ColumnKind::Categorical, i));
        }
    }

    Ok(Encoder {
        numeric,
        categorical,
        encoded_names,
        origins,
    })
}

/// Encode a block with a fitted encoder: numerics standardized with the
/// training statistics, categoricals one-hot expanded. An unseen level
/// yields an all-zero indicator group.
pub fn apply_encoder(enc: &Encoder, block: &ImputedBlock) -> Result<Matrix> {
    if block.numeric.len() != enc.numeric.len() || block.categorical.len() != enc.categorical.len()
    {
        return Err(Error::Encode(format!(
            "column layout mismatch: encoder fitted on {}+{} columns, block has {}+{}",
            enc.numeric.len(),
            enc.categorical.len(),
            block.numeric.len(),
            block.categorical.len()
        )));
    }
    for (stat, (name, _)) in enc.numeric.iter().zip(&block.numeric) {
        if stat.name != *name {
            return Err(Error::Encode(format!(
                "numeric column order mismatch: expected '{}', found '{}'",
                stat.name, name
            )));
        }
    }
    for (lv, (name, _)) in enc.categorical.iter().zip(&block.categorical) {
        if lv.name != *name {
            return Err(Error::Encode(format!(
                "categorical column order mismatch: expected '{}', found '{}'",
                lv.name, name
            )));
        }
    }

    let n = block.n_rows;
    let mut out = Matrix::zeros(n, enc.n_encoded());
    let mut col = 0usize;
    for (stat, (_, values)) in enc.numeric.iter().zip(&block.numeric) {
        for (r, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Encode(format!(
                    "non-finite value {v} in numeric column '{}'",
                    stat.name
                )));
            }
            out.set(r, col, (v - stat.mean) / stat.stdev);
        }
        col += 1;
    }
    for (lv, (_, symbols)) in enc.categorical.iter().zip(&block.categorical) {
        for (r, s) in symbols.iter().enumerate() {
            // Unseen level: all indicators stay zero.
            if let Ok(k) = lv.levels.binary_search(s) {
                out.set(r, col + k, 1.0);
            }
        }
        col += lv.levels.len();
    }
    debug_assert_eq!(col, enc.n_encoded());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn block(numeric: Vec<(&str, Vec<f64>)>, categorical: Vec<(&str, Vec<&str>)>) -> ImputedBlock {
        let n_rows = numeric
            .first()
            .map(|(_, v)| v.len())
            .or_else(|| categorical.first().map(|(_, v)| v.len()))
            .unwrap_or(0);
        ImputedBlock {
            numeric: numeric
                .into_iter()
                .map(|(n, v)| (n.to_string(), v))
                .collect(),
            categorical: categorical
                .into_iter()
                .map(|(n, v)| (n.to_string(), v.into_iter().map(String::from).collect()))
                .collect(),
            n_rows,
        }
    }

    #[test]
    fn standardizes_with_population_stdev() {
        let b = block(vec![("x", vec![1.0, 2.0, 3.0])], vec![]);
        let enc = fit_encoder(&b).unwrap();
        let m = apply_encoder(&enc, &b).unwrap();
        let expect = 1.0 / (2.0f64 / 3.0).sqrt(); // (3-2)/sqrt(2/3) = 1.2247...
        assert!((m.get(0, 0) + expect).abs() < 1e-12);
        assert!(m.get(1, 0).abs() < 1e-12);
        assert!((m.get(2, 0) - expect).abs() < 1e-12);
        assert!((expect - 1.2247).abs() < 1e-4);
    }

    #[test]
    fn constant_column_encodes_to_zero() {
        let b = block(vec![("x", vec![5.0, 5.0, 5.0])], vec![]);
        let enc = fit_encoder(&b).unwrap();
        let m = apply_encoder(&enc, &b).unwrap();
        for r in 0..3 {
            assert_eq!(m.get(r, 0), 0.0);
        }
    }

    #[test]
    fn one_hot_levels_sorted_lexicographically() {
        let b = block(vec![], vec![("color", vec!["red", "blue", "red"])]);
        let enc = fit_encoder(&b).unwrap();
        assert_eq!(enc.encoded_names(), &["color=blue", "color=red"]);
        let m = apply_encoder(&enc, &b).unwrap();
        assert_eq!(m.row(0), &[0.0, 1.0]);
        assert_eq!(m.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn unseen_level_encodes_all_zeros() {
        let train = block(vec![], vec![("color", vec!["red", "blue"])]);
        let enc = fit_encoder(&train).unwrap();
        let test = block(vec![], vec![("color", vec!["green"])]);
        let m = apply_encoder(&enc, &test).unwrap();
        assert_eq!(m.row(0), &[0.0, 0.0]);
    }

    #[test]
    fn thirty_nine_raw_to_fifty_six_encoded() {
        // 22 numeric + 17 two-level categoricals = 39 raw, 22 + 34 = 56 encoded.
        let mut numeric = Vec::new();
        for i in 0..22 {
            numeric.push((format!("num{i:02}"), vec![0.0, 1.0, 2.0]));
        }
        let mut categorical = Vec::new();
        for i in 0..17 {
            categorical.push((format!("cat{i:02}"), vec!["a".into(), "b".into(), "a".into()]));
        }
        let b = ImputedBlock {
            numeric,
            categorical,
            n_rows: 3,
        };
        let enc = fit_encoder(&b).unwrap();
        assert_eq!(enc.n_encoded(), 56);
    }

    #[test]
    fn group_of_spans_indicator_columns() {
        let b = block(
            vec![("x", vec![1.0, 2.0])],
            vec![("c", vec!["a", "b"]), ("d", vec!["u", "u"])],
        );
        let enc = fit_encoder(&b).unwrap();
        // layout: x, c=a, c=b, d=u
        assert_eq!(enc.group_of(0), vec![0]);
        assert_eq!(enc.group_of(1), vec![1, 2]);
        assert_eq!(enc.group_of(2), vec![1, 2]);
        assert_eq!(enc.group_of(3), vec![3]);
        assert_eq!(enc.source_column(2), "c");
    }

    #[test]
    fn missing_cell_is_contract_violation() {
        use crate::table::{ColumnSchema, DataTable};
        let schema = vec![ColumnSchema::numeric("x"), ColumnSchema::label("y")];
        let cols = vec![
            ColumnData::Numeric(vec![Some(1.0), None]),
            ColumnData::Categorical(vec![Some("a".into()), Some("b".into())]),
        ];
        let t = DataTable::new(schema, cols).unwrap();
        assert!(ImputedBlock::from_table(&t, &[0, 1]).is_err());
        assert!(ImputedBlock::from_table(&t, &[0]).is_ok());
    }

    proptest! {
        #[test]
        fn train_encoding_is_centered_and_unit(values in proptest::collection::vec(-1e3f64..1e3, 3..40)) {
            let b = block(vec![("x", values.clone())], vec![]);
            let enc = fit_encoder(&b).unwrap();
            let m = apply_encoder(&enc, &b).unwrap();
            let n = values.len() as f64;
            let mean: f64 = (0..values.len()).map(|r| m.get(r, 0)).sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-9);
            let distinct = values.iter().any(|v| (v - values[0]).abs() > 1e-9);
            if distinct {
                let var: f64 = (0..values.len()).map(|r| m.get(r, 0).powi(2)).sum::<f64>() / n;
                prop_assert!((var.sqrt() - 1.0).abs() < 1e-6);
            }
        }

        #[test]
        fn one_hot_rows_sum_to_one_for_seen_levels(
            symbols in proptest::collection::vec("[a-d]", 2..30),
        ) {
            let refs: Vec<&str> = symbols.iter().map(String::as_str).collect();
            let b = block(vec![], vec![("c", refs)]);
            let enc = fit_encoder(&b).unwrap();
            let m = apply_encoder(&enc, &b).unwrap();
            for r in 0..m.n_rows() {
                let s: f64 = m.row(r).iter().sum();
                prop_assert_eq!(s, 1.0);
            }
        }
    }
}
