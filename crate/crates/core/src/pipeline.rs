//! Leak-free pipeline composition shared by cross-validation, the
//! hyperparameter search, the feature sweep and final fits.
//!
//! The order is fixed: imputers and the encoder fit on the training split
//! only, both splits are transformed, SMOTE runs on the training split
//! only, then the model trains and is evaluated on the untouched
//! validation/test split.
//!
//! Seed discipline: every entry point takes one seed and derives the
//! streams it needs — `"cv"` for fold assignment, `"smote"` and `"model"`
//! (indexed by fold) for resampling and training. Cross-validation first
//! reorders rows canonically (by label, then cell content), which makes its
//! results invariant to the row order of the input table.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encode::{apply_encoder, fit_encoder, Encoder, ImputedBlock};
use crate::error::{Error, Result};
use crate::gbdt::{train, Ensemble, HyperParams};
use crate::impute::{
    impute_numeric_with, knn_fit, mode_fit, mode_transform, KnnImputerModel, ModeImputerModel,
    NeighborTable,
};
use crate::matrix::Matrix;
use crate::metrics::{compute_metrics, ConfusionMatrix, MetricsReport};
use crate::seed::{substream, substream_i};
use crate::smote::{smote, SmoteAudit, SmoteConfig};
use crate::split::stratified_kfold;
use crate::table::{ColumnData, DataTable};

/// Everything the pipeline needs besides data and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSettings {
    pub hp: HyperParams,
    /// Neighbor count for the KNN imputer.
    pub knn_k: usize,
    /// SMOTE parameters; the `seed` field is ignored here because every
    /// entry point derives per-fold seeds from its own seed argument.
    pub smote: SmoteConfig,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        PipelineSettings {
            hp: HyperParams::default(),
            knn_k: 5,
            smote: SmoteConfig::default(),
        }
    }
}

/// Fitted preprocessing stack: mode imputer, KNN imputer, encoder.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub mode: ModeImputerModel,
    pub knn: KnnImputerModel,
    pub encoder: Encoder,
}

fn imputed_block(
    mode: &ModeImputerModel,
    knn: &KnnImputerModel,
    neighbors: &NeighborTable,
    knn_k: usize,
    table: &DataTable,
    rows: &[usize],
) -> Result<ImputedBlock> {
    let numeric = impute_numeric_with(knn, neighbors, table, rows, knn_k)?;
    let categorical = mode_transform(mode, table, rows)?;
    Ok(ImputedBlock {
        numeric,
        categorical,
        n_rows: rows.len(),
    })
}

/// Fit the full preprocessing stack on the given training rows.
pub fn fit_preprocessor(table: &DataTable, train_rows: &[usize], knn_k: usize) -> Result<Preprocessor> {
    let mode = mode_fit(table, train_rows)?;
    let knn = knn_fit(table, train_rows, knn_k)?;
    let neighbors = NeighborTable::build(&knn, table, train_rows);
    let block = imputed_block(&mode, &knn, &neighbors, knn_k, table, train_rows)?;
    let encoder = fit_encoder(&block)?;
    Ok(Preprocessor { mode, knn, encoder })
}

impl Preprocessor {
    /// Impute and encode the given rows.
    pub fn transform(&self, table: &DataTable, rows: &[usize]) -> Result<Matrix> {
        let neighbors = NeighborTable::build(&self.knn, table, rows);
        let block = imputed_block(&self.mode, &self.knn, &neighbors, self.knn.k(), table, rows)?;
        apply_encoder(&self.encoder, &block)
    }
}

/// Canonical row order: ascending by (label, cell content, original index).
/// Missing cells sort after observed ones. Rows with identical label and
/// content are interchangeable, so downstream results do not depend on the
/// original ordering.
pub fn canonical_row_order(table: &DataTable, labels: &[u8]) -> Vec<usize> {
    use std::cmp::Ordering;
    let mut idx: Vec<usize> = (0..table.n_rows()).collect();
    let cmp_rows = |a: usize, b: usize| -> Ordering {
        labels[a].cmp(&labels[b]).then_with(|| {
            for c in 0..table.n_cols() {
                let ord = match table.column(c) {
                    ColumnData::Numeric(v) => match (&v[a], &v[b]) {
                        (Some(x), Some(y)) => x.total_cmp(y),
                        (Some(_), None) => Ordering::Less,
                        (None, Some(_)) => Ordering::Greater,
                        (None, None) => Ordering::Equal,
                    },
                    ColumnData::Categorical(v) => match (&v[a], &v[b]) {
                        (Some(x), Some(y)) => x.cmp(y),
                        (Some(_), None) => Ordering::Less,
                        (None, Some(_)) => Ordering::Greater,
                        (None, None) => Ordering::Equal,
                    },
                };
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
    };
    idx.sort_by(|&a, &b| cmp_rows(a, b).then(a.cmp(&b)));
    idx
}

/// Per-fold preprocessing state that does not depend on trial parameters:
/// fold membership, the fitted imputers, neighbor orderings, and the
/// mode-imputed categorical columns. A hyperparameter search prepares these
/// once and reuses them across every trial.
pub struct FoldCache {
    pub train_rows: Vec<usize>,
    pub valid_rows: Vec<usize>,
    knn: KnnImputerModel,
    nt_train: NeighborTable,
    nt_valid: NeighborTable,
    cat_train: Vec<(String, Vec<String>)>,
    cat_valid: Vec<(String, Vec<String>)>,
}

impl FoldCache {
    pub fn prepare(table: &DataTable, train_rows: Vec<usize>, valid_rows: Vec<usize>) -> Result<Self> {
        let mode = mode_fit(table, &train_rows)?;
        // The stored k is irrelevant; imputation always passes an explicit k.
        let knn = knn_fit(table, &train_rows, 1)?;
        let nt_train = NeighborTable::build(&knn, table, &train_rows);
        let nt_valid = NeighborTable::build(&knn, table, &valid_rows);
        let cat_train = mode_transform(&mode, table, &train_rows)?;
        let cat_valid = mode_transform(&mode, table, &valid_rows)?;
        Ok(FoldCache {
            train_rows,
            valid_rows,
            knn,
            nt_train,
            nt_valid,
            cat_train,
            cat_valid,
        })
    }
}

/// Indices of the encoded columns to keep for a feature subset, in encoder
/// order. `None` keeps everything.
fn subset_columns(encoder: &Encoder, subset: Option<&BTreeSet<String>>) -> Option<Vec<usize>> {
    subset.map(|names| {
        encoder
            .encoded_names()
            .iter()
            .enumerate()
            .filter(|(_, n)| names.contains(*n))
            .map(|(i, _)| i)
            .collect()
    })
}

fn apply_subset(
    encoder: &Encoder,
    x: Matrix,
    keep: &Option<Vec<usize>>,
) -> Result<(Matrix, Vec<String>)> {
    match keep {
        None => {
            let names = encoder.encoded_names().to_vec();
            Ok((x, names))
        }
        Some(keep) => {
            if keep.is_empty() {
                return Err(Error::Selection(
                    "feature subset selects no encoded columns".into(),
                ));
            }
            let names = keep
                .iter()
                .map(|&i| encoder.encoded_names()[i].clone())
                .collect();
            Ok((x.select_columns(keep)?, names))
        }
    }
}

/// Train on one fold and evaluate on its validation rows.
fn run_fold(
    table: &DataTable,
    labels: &[u8],
    cache: &FoldCache,
    settings: &PipelineSettings,
    subset: Option<&BTreeSet<String>>,
    smote_seed: u64,
    model_seed: u64,
) -> Result<MetricsReport> {
    let numeric_train = impute_numeric_with(
        &cache.knn,
        &cache.nt_train,
        table,
        &cache.train_rows,
        settings.knn_k,
    )?;
    let block_train = ImputedBlock {
        numeric: numeric_train,
        categorical: cache.cat_train.clone(),
        n_rows: cache.train_rows.len(),
    };
    let encoder = fit_encoder(&block_train)?;
    let keep = subset_columns(&encoder, subset);
    let (x_train, names) = apply_subset(&encoder, apply_encoder(&encoder, &block_train)?, &keep)?;

    let numeric_valid = impute_numeric_with(
        &cache.knn,
        &cache.nt_valid,
        table,
        &cache.valid_rows,
        settings.knn_k,
    )?;
    let block_valid = ImputedBlock {
        numeric: numeric_valid,
        categorical: cache.cat_valid.clone(),
        n_rows: cache.valid_rows.len(),
    };
    let (x_valid, _) = apply_subset(&encoder, apply_encoder(&encoder, &block_valid)?, &keep)?;

    let y_train: Vec<u8> = cache.train_rows.iter().map(|&r| labels[r]).collect();
    let y_valid: Vec<u8> = cache.valid_rows.iter().map(|&r| labels[r]).collect();

    let smote_cfg = SmoteConfig {
        seed: smote_seed,
        ..settings.smote.clone()
    };
    let (x_bal, y_bal, _) = smote(&x_train, &y_train, &smote_cfg)?;

    let hp = HyperParams {
        seed: model_seed,
        ..settings.hp.clone()
    };
    let model = train(&x_bal, &y_bal, &hp, names)?;
    let predicted = model.predict_label(&x_valid, 0.5)?;
    compute_metrics(&ConfusionMatrix::from_labels(&y_valid, &predicted)?)
}

/// Cross-validation outcome: the objective plus per-fold reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvOutcome {
    pub mean_bacc: f64,
    pub folds: Vec<MetricsReport>,
}

/// Evaluate prepared folds under one parameter assignment. Fold seeds are
/// `substream_i(seed, "smote"|"model", fold)`.
pub(crate) fn cv_over_folds(
    table: &DataTable,
    labels: &[u8],
    caches: &[FoldCache],
    settings: &PipelineSettings,
    subset: Option<&BTreeSet<String>>,
    seed: u64,
) -> Result<CvOutcome> {
    let folds: Vec<MetricsReport> = caches
        .par_iter()
        .enumerate()
        .map(|(f, cache)| {
            run_fold(
                table,
                labels,
                cache,
                settings,
                subset,
                substream_i(seed, "smote", f as u64),
                substream_i(seed, "model", f as u64),
            )
        })
        .collect::<Result<_>>()?;
    let mean_bacc = folds.iter().map(|m| m.bacc).sum::<f64>() / folds.len() as f64;
    Ok(CvOutcome { mean_bacc, folds })
}

/// Canonicalize rows, assign stratified folds (`substream(seed, "cv")`),
/// and prepare the per-fold caches.
pub(crate) fn prepare_cv(
    table: &DataTable,
    labels: &[u8],
    k_folds: usize,
    seed: u64,
) -> Result<(DataTable, Vec<u8>, Vec<FoldCache>)> {
    if table.n_rows() != labels.len() {
        return Err(Error::Split(format!(
            "{} rows but {} labels",
            table.n_rows(),
            labels.len()
        )));
    }
    let order = canonical_row_order(table, labels);
    let ctable = table.select_rows(&order);
    let clabels: Vec<u8> = order.iter().map(|&i| labels[i]).collect();
    let folds = stratified_kfold(&clabels, k_folds, substream(seed, "cv"))?;
    let caches: Vec<FoldCache> = folds
        .into_par_iter()
        .map(|(tr, va)| FoldCache::prepare(&ctable, tr, va))
        .collect::<Result<_>>()?;
    Ok((ctable, clabels, caches))
}

/// Stratified k-fold cross-validation of the full pipeline, scoring mean
/// balanced accuracy. Leak-free by construction: every fit happens on the
/// fold-train rows only.
pub fn cross_val_bacc(
    table: &DataTable,
    labels: &[u8],
    settings: &PipelineSettings,
    k_folds: usize,
    seed: u64,
) -> Result<CvOutcome> {
    let (ctable, clabels, caches) = prepare_cv(table, labels, k_folds, seed)?;
    cv_over_folds(&ctable, &clabels, &caches, settings, None, seed)
}

/// Preprocessed train/test matrices ready for repeated fits on different
/// feature subsets (the sweep reuses one of these across every N).
pub struct PreparedSplit {
    pub preprocessor: Preprocessor,
    pub x_train: Matrix,
    pub x_test: Matrix,
    pub y_train: Vec<u8>,
    pub y_test: Vec<u8>,
}

pub fn prepare_split(
    train: &DataTable,
    y_train: &[u8],
    test: &DataTable,
    y_test: &[u8],
    knn_k: usize,
) -> Result<PreparedSplit> {
    let train_rows: Vec<usize> = (0..train.n_rows()).collect();
    let test_rows: Vec<usize> = (0..test.n_rows()).collect();
    let preprocessor = fit_preprocessor(train, &train_rows, knn_k)?;
    let x_train = preprocessor.transform(train, &train_rows)?;
    let x_test = preprocessor.transform(test, &test_rows)?;
    Ok(PreparedSplit {
        preprocessor,
        x_train,
        x_test,
        y_train: y_train.to_vec(),
        y_test: y_test.to_vec(),
    })
}

/// A fitted model with its held-out evaluation.
pub struct FitOutcome {
    pub ensemble: Ensemble,
    pub metrics: MetricsReport,
    /// Encoded training matrix (feature subset applied, no synthetic rows);
    /// the substrate for SHAP attribution.
    pub x_train: Matrix,
    pub feature_names: Vec<String>,
    pub smote_audit: SmoteAudit,
}

/// Fit on prepared matrices, optionally restricted to a feature subset, and
/// evaluate on the test rows. Seeds: `substream(seed, "smote")` and
/// `substream(seed, "model")`.
pub fn fit_on_prepared(
    prepared: &PreparedSplit,
    settings: &PipelineSettings,
    subset: Option<&BTreeSet<String>>,
    seed: u64,
) -> Result<FitOutcome> {
    let keep = subset_columns(&prepared.preprocessor.encoder, subset);
    let (x_train, names) =
        apply_subset(&prepared.preprocessor.encoder, prepared.x_train.clone(), &keep)?;
    let (x_test, _) =
        apply_subset(&prepared.preprocessor.encoder, prepared.x_test.clone(), &keep)?;

    let smote_cfg = SmoteConfig {
        seed: substream(seed, "smote"),
        ..settings.smote.clone()
    };
    let (x_bal, y_bal, smote_audit) = smote(&x_train, &prepared.y_train, &smote_cfg)?;
    let hp = HyperParams {
        seed: substream(seed, "model"),
        ..settings.hp.clone()
    };
    let ensemble = train(&x_bal, &y_bal, &hp, names.clone())?;
    let predicted = ensemble.predict_label(&x_test, 0.5)?;
    let metrics = compute_metrics(&ConfusionMatrix::from_labels(&prepared.y_test, &predicted)?)?;
    Ok(FitOutcome {
        ensemble,
        metrics,
        x_train,
        feature_names: names,
        smote_audit,
    })
}

/// Fit the full pipeline on a train table and evaluate on a test table.
pub fn final_fit_eval(
    train: &DataTable,
    y_train: &[u8],
    test: &DataTable,
    y_test: &[u8],
    settings: &PipelineSettings,
    subset: Option<&BTreeSet<String>>,
    seed: u64,
) -> Result<(PreparedSplit, FitOutcome)> {
    let prepared = prepare_split(train, y_train, test, y_test, settings.knn_k)?;
    let outcome = fit_on_prepared(&prepared, settings, subset, seed)?;
    Ok((prepared, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{ColumnSchema, DataTable};

    /// Small mixed table with some missing cells and a signal of the given
    /// strength.
    fn toy_table_sep(n_per_class: usize, seed: u64, sep: f64) -> (DataTable, Vec<u8>) {
        use rand::Rng;
        let mut rng = crate::seed::rng_from(seed);
        let n = n_per_class * 2;
        let mut num = Vec::with_capacity(n);
        let mut cat = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let label = u8::from(i >= n_per_class);
            let center = if label == 1 { sep } else { -sep };
            num.push(if rng.gen::<f64>() < 0.1 {
                None
            } else {
                Some(center + rng.gen_range(-1.0..1.0))
            });
            cat.push(if rng.gen::<f64>() < 0.1 {
                None
            } else if rng.gen::<f64>() < if label == 1 { 0.8 } else { 0.2 } {
                Some("a".to_string())
            } else {
                Some("b".to_string())
            });
            labels.push(label);
        }
        let schema = vec![ColumnSchema::numeric("x"), ColumnSchema::categorical("c")];
        let cols = vec![ColumnData::Numeric(num), ColumnData::Categorical(cat)];
        (DataTable::new(schema, cols).unwrap(), labels)
    }

    fn toy_table(n_per_class: usize, seed: u64) -> (DataTable, Vec<u8>) {
        toy_table_sep(n_per_class, seed, 2.0)
    }

    fn fast_settings() -> PipelineSettings {
        PipelineSettings {
            hp: HyperParams {
                n_estimators: 8,
                max_depth: 3,
                ..HyperParams::default()
            },
            knn_k: 3,
            smote: SmoteConfig::default(),
        }
    }

    #[test]
    fn cross_val_is_deterministic() {
        let (t, y) = toy_table(30, 5);
        let s = fast_settings();
        let a = cross_val_bacc(&t, &y, &s, 5, 42).unwrap();
        let b = cross_val_bacc(&t, &y, &s, 5, 42).unwrap();
        assert_eq!(a.mean_bacc, b.mean_bacc);
        assert_eq!(a.folds, b.folds);
        assert_eq!(a.folds.len(), 5);
    }

    #[test]
    fn cross_val_seed_changes_fold_assignment() {
        // overlapping classes so fold scores are not saturated at 1.0
        let (t, y) = toy_table_sep(30, 5, 0.4);
        let s = fast_settings();
        let a = cross_val_bacc(&t, &y, &s, 5, 42).unwrap();
        let c = cross_val_bacc(&t, &y, &s, 5, 43).unwrap();
        assert!(a.mean_bacc != c.mean_bacc || a.folds != c.folds);
    }

    #[test]
    fn cross_val_invariant_to_row_order() {
        let (t, y) = toy_table(25, 9);
        let s = fast_settings();
        let a = cross_val_bacc(&t, &y, &s, 5, 7).unwrap();

        // reverse the rows
        let order: Vec<usize> = (0..t.n_rows()).rev().collect();
        let t_rev = t.select_rows(&order);
        let y_rev: Vec<u8> = order.iter().map(|&i| y[i]).collect();
        let b = cross_val_bacc(&t_rev, &y_rev, &s, 5, 7).unwrap();
        assert_eq!(a.mean_bacc.to_bits(), b.mean_bacc.to_bits());
        assert_eq!(a.folds, b.folds);
    }

    #[test]
    fn separable_data_scores_high() {
        let (t, y) = toy_table(40, 13);
        let s = fast_settings();
        let out = cross_val_bacc(&t, &y, &s, 5, 3).unwrap();
        assert!(out.mean_bacc > 0.9, "mean bacc {}", out.mean_bacc);
    }

    #[test]
    fn final_fit_subset_of_everything_matches_full() {
        let (t, y) = toy_table(30, 21);
        let train_idx: Vec<usize> = (0..40).collect();
        let test_idx: Vec<usize> = (40..60).collect();
        let train = t.select_rows(&train_idx);
        let test = t.select_rows(&test_idx);
        let y_train: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();
        let y_test: Vec<u8> = test_idx.iter().map(|&i| y[i]).collect();
        let s = fast_settings();

        let (_, full) = final_fit_eval(&train, &y_train, &test, &y_test, &s, None, 99).unwrap();
        let all_names: BTreeSet<String> = full.feature_names.iter().cloned().collect();
        let (_, subset) =
            final_fit_eval(&train, &y_train, &test, &y_test, &s, Some(&all_names), 99).unwrap();
        assert_eq!(full.metrics, subset.metrics);
        assert_eq!(full.ensemble, subset.ensemble);
    }

    #[test]
    fn canonical_order_sorts_by_label_then_content() {
        let schema = vec![ColumnSchema::numeric("x")];
        let cols = vec![ColumnData::Numeric(vec![
            Some(3.0),
            Some(1.0),
            None,
            Some(2.0),
        ])];
        let t = DataTable::new(schema, cols).unwrap();
        let y = vec![1, 0, 0, 1];
        let order = canonical_row_order(&t, &y);
        // label 0 first: rows 1 (x=1) then 2 (missing); label 1: rows 3 (x=2), 0 (x=3)
        assert_eq!(order, vec![1, 2, 3, 0]);
    }
}
