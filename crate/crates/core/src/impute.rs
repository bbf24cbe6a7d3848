//! Missing-value imputation: K-nearest-neighbors averaging for numeric
//! columns, training-set mode for categorical columns.
//!
//! Distances are masked Euclidean over standardized copies of the numeric
//! columns (fit-time statistics), scaled by `D/|S|` where `S` is the set of
//! coordinates observed in both rows and `D` the total column count. Rows
//! with empty overlap get infinite distance and never donate. Distance ties
//! break by lower reference index; donor values are averaged in ascending
//! (distance, index) order so results are reproducible bit for bit.

use crate::error::{Error, Result};
use crate::table::{ColumnData, ColumnRole, DataTable};

/// Fitted KNN imputer for the numeric feature columns of a table.
#[derive(Debug, Clone)]
pub struct KnnImputerModel {
    k: usize,
    /// Numeric feature column names, in schema order.
    col_names: Vec<String>,
    /// Reference rows projected onto the numeric columns, raw units.
    references: Vec<Vec<Option<f64>>>,
    /// References standardized with `means`/`stds`.
    std_references: Vec<Vec<Option<f64>>>,
    /// Per-column mean of observed training values (standardization).
    means: Vec<f64>,
    /// Per-column population stdev of observed training values; a value of
    /// 1.0 substitutes when the observed spread is below 1e-12, so constant
    /// columns contribute raw differences.
    stds: Vec<f64>,
    /// Per-column mean of observed training values, raw units (fallback).
    column_means: Vec<f64>,
}

impl KnnImputerModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_references(&self) -> usize {
        self.references.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.col_names
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    fn standardize(&self, col: usize, v: f64) -> f64 {
        (v - self.means[col]) / self.stds[col]
    }

    /// Numeric-feature cells of a table row, in model column order.
    fn project_row(&self, table: &DataTable, row: usize, cols: &[usize]) -> Vec<Option<f64>> {
        cols.iter()
            .map(|&c| match table.column(c) {
                ColumnData::Numeric(v) => v[row],
                ColumnData::Categorical(_) => unreachable!("numeric projection"),
            })
            .collect()
    }
}

fn numeric_feature_columns(table: &DataTable) -> Vec<usize> {
    table
        .schema()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.role == ColumnRole::Feature && matches!(c.kind, crate::table::ColumnKind::Numeric))
        .map(|(i, _)| i)
        .collect()
}

/// Fit a KNN imputer on the numeric feature columns of `rows`.
///
/// Errors if `k` is zero or exceeds the reference count, or if any numeric
/// column has no observed training value (nothing to impute from).
pub fn knn_fit(table: &DataTable, rows: &[usize], k: usize) -> Result<KnnImputerModel> {
    if k == 0 {
        return Err(Error::Impute("k must be at least 1".into()));
    }
    if k > rows.len() {
        return Err(Error::Impute(format!(
            "k = {k} exceeds the {} reference rows",
            rows.len()
        )));
    }
    let cols = numeric_feature_columns(table);
    let col_names: Vec<String> = cols
        .iter()
        .map(|&c| table.schema()[c].name.clone())
        .collect();

    let mut references = Vec::with_capacity(rows.len());
    for &r in rows {
        let cells: Vec<Option<f64>> = cols
            .iter()
            .map(|&c| match table.column(c) {
                ColumnData::Numeric(v) => v[r],
                ColumnData::Categorical(_) => unreachable!(),
            })
            .collect();
        references.push(cells);
    }

    let mut means = Vec::with_capacity(cols.len());
    let mut stds = Vec::with_capacity(cols.len());
    let mut column_means = Vec::with_capacity(cols.len());
    let mut any_observed_row = false;
    for (j, name) in col_names.iter().enumerate() {
        let observed: Vec<f64> = references.iter().filter_map(|row| row[j]).collect();
        if observed.is_empty() {
            return Err(Error::Impute(format!(
                "numeric column '{name}' has no observed training value"
            )));
        }
        if let Some(bad) = observed.iter().find(|v| !v.is_finite()) {
            return Err(Error::Impute(format!(
                "non-finite value {bad} in numeric column '{name}'"
            )));
        }
        let mean = observed.iter().sum::<f64>() / observed.len() as f64;
        let var = observed.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / observed.len() as f64;
        let std = var.sqrt();
        means.push(mean);
        stds.push(if std > 1e-12 { std } else { 1.0 });
        column_means.push(mean);
        any_observed_row = true;
    }
    if !cols.is_empty() && !any_observed_row {
        return Err(Error::Impute("no observed numeric values".into()));
    }

    let mut model = KnnImputerModel {
        k,
        col_names,
        references,
        std_references: Vec::new(),
        means,
        stds,
        column_means,
    };
    model.std_references = model
        .references
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, v)| v.map(|x| model.standardize(j, x)))
                .collect()
        })
        .collect();
    Ok(model)
}

/// For each query row, the reference indices ordered by ascending masked
/// distance (ties by index), finite distances only. Distances do not depend
/// on `k`, so a table built once serves any neighbor count.
#[derive(Debug, Clone)]
pub struct NeighborTable {
    order: Vec<Vec<u32>>,
}

impl NeighborTable {
    pub fn build(model: &KnnImputerModel, table: &DataTable, rows: &[usize]) -> NeighborTable {
        let cols = numeric_feature_columns(table);
        let d_total = model.col_names.len() as f64;
        let order = rows
            .iter()
            .map(|&r| {
                let raw = model.project_row(table, r, &cols);
                let q: Vec<Option<f64>> = raw
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v.map(|x| model.standardize(j, x)))
                    .collect();
                let mut dists: Vec<(f64, u32)> = Vec::with_capacity(model.references.len());
                for (ri, sref) in model.std_references.iter().enumerate() {
                    let mut ss = 0.0f64;
                    let mut overlap = 0usize;
                    for (a, b) in q.iter().zip(sref) {
                        if let (Some(a), Some(b)) = (a, b) {
                            let d = a - b;
                            ss += d * d;
                            overlap += 1;
                        }
                    }
                    if overlap > 0 {
                        // Comparison key: scaled squared distance. The metric
                        // itself is its square root; ordering is identical and
                        // the key avoids ties created by sqrt rounding.
                        dists.push((d_total / overlap as f64 * ss, ri as u32));
                    }
                }
                dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                dists.into_iter().map(|(_, i)| i).collect()
            })
            .collect();
        NeighborTable { order }
    }
}

/// Impute the numeric feature columns of `rows` using a prebuilt neighbor
/// table and an explicit neighbor count. Observed cells pass through
/// bit-identical; a missing cell takes the mean of the `k` nearest
/// references that observe its column, or the column mean if none do.
pub fn impute_numeric_with(
    model: &KnnImputerModel,
    neighbors: &NeighborTable,
    table: &DataTable,
    rows: &[usize],
    k: usize,
) -> Result<Vec<(String, Vec<f64>)>> {
    if k == 0 || k > model.n_references() {
        return Err(Error::Impute(format!(
            "k = {k} out of range for {} references",
            model.n_references()
        )));
    }
    let cols = numeric_feature_columns(table);
    if cols.len() != model.col_names.len() {
        return Err(Error::Impute(format!(
            "model fitted on {} numeric columns, table has {}",
            model.col_names.len(),
            cols.len()
        )));
    }
    let mut out: Vec<(String, Vec<f64>)> = model
        .col_names
        .iter()
        .map(|n| (n.clone(), Vec::with_capacity(rows.len())))
        .collect();
    for (qi, &r) in rows.iter().enumerate() {
        let raw = model.project_row(table, r, &cols);
        for (j, cell) in raw.iter().enumerate() {
            let value = match cell {
                Some(v) => *v,
                None => {
                    let mut sum = 0.0f64;
                    let mut taken = 0usize;
                    for &ri in &neighbors.order[qi] {
                        if let Some(v) = model.references[ri as usize][j] {
                            sum += v;
                            taken += 1;
                            if taken == k {
                                break;
                            }
                        }
                    }
                    if taken == 0 {
                        model.column_means[j]
                    } else {
                        sum / taken as f64
                    }
                }
            };
            out[j].1.push(value);
        }
    }
    Ok(out)
}

/// Impute numeric feature columns with the model's own `k`.
pub fn knn_transform(
    model: &KnnImputerModel,
    table: &DataTable,
    rows: &[usize],
) -> Result<Vec<(String, Vec<f64>)>> {
    let nt = NeighborTable::build(model, table, rows);
    impute_numeric_with(model, &nt, table, rows, model.k)
}

/// Fitted mode imputer for categorical feature columns.
#[derive(Debug, Clone)]
pub struct ModeImputerModel {
    /// (column name, modal symbol, modal count), in schema order.
    modes: Vec<(String, String, usize)>,
}

impl ModeImputerModel {
    pub fn modes(&self) -> &[(String, String, usize)] {
        &self.modes
    }
}

fn categorical_feature_columns(table: &DataTable) -> Vec<usize> {
    table
        .schema()
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            c.role == ColumnRole::Feature && matches!(c.kind, crate::table::ColumnKind::Categorical)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Fit per-column modes over the training rows. Ties break toward the
/// lexicographically smallest symbol. Errors if a column is entirely
/// missing in training.
pub fn mode_fit(table: &DataTable, rows: &[usize]) -> Result<ModeImputerModel> {
    let mut modes = Vec::new();
    for c in categorical_feature_columns(table) {
        let name = table.schema()[c].name.clone();
        let ColumnData::Categorical(v) = table.column(c) else {
            unreachable!()
        };
        let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
        for &r in rows {
            if let Some(s) = &v[r] {
                *counts.entry(s.as_str()).or_insert(0) += 1;
            }
        }
        let mut best: Option<(&str, usize)> = None;
        for (sym, n) in counts {
            match best {
                Some((_, bn)) if n <= bn => {}
                _ => best = Some((sym, n)),
            }
        }
        // BTreeMap iterates symbols in ascending order and only a strictly
        // greater count replaces, so ties keep the smallest symbol.
        let Some((sym, n)) = best else {
            return Err(Error::Impute(format!(
                "categorical column '{name}' entirely missing in training rows"
            )));
        };
        modes.push((name, sym.to_string(), n));
    }
    Ok(ModeImputerModel { modes })
}

/// Replace every missing categorical cell with the stored training mode.
pub fn mode_transform(
    model: &ModeImputerModel,
    table: &DataTable,
    rows: &[usize],
) -> Result<Vec<(String, Vec<String>)>> {
    let cols = categorical_feature_columns(table);
    if cols.len() != model.modes.len() {
        return Err(Error::Impute(format!(
            "model fitted on {} categorical columns, table has {}",
            model.modes.len(),
            cols.len()
        )));
    }
    let mut out = Vec::with_capacity(cols.len());
    for (c, (name, mode, _)) in cols.iter().zip(&model.modes) {
        let ColumnData::Categorical(v) = table.column(*c) else {
            unreachable!()
        };
        let values: Vec<String> = rows
            .iter()
            .map(|&r| v[r].clone().unwrap_or_else(|| mode.clone()))
            .collect();
        out.push((name.clone(), values));
    }
    Ok(out)
}
