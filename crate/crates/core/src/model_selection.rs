//! Random hyperparameter search maximizing mean cross-validated balanced
//! accuracy.
//!
//! The sampler is uniform per parameter, log-uniform where the range spans
//! orders of magnitude (learning rate, both regularizers). Every trial is
//! scored on the same fold assignment; the imputer's neighbor count is part
//! of the space, so imputation is tuned jointly with the model.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbdt::{GrowthMode, HyperParams};
use crate::metrics::MetricsReport;
use crate::pipeline::{cv_over_folds, prepare_cv, PipelineSettings};
use crate::seed::{rng_for_i, substream};
use crate::table::DataTable;

/// One searchable parameter range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamRange {
    /// Uniform integer, inclusive bounds.
    Int { lo: i64, hi: i64 },
    /// Uniform real.
    Real { lo: f64, hi: f64 },
    /// Log-uniform real; requires positive bounds.
    LogReal { lo: f64, hi: f64 },
}

impl ParamRange {
    fn validate(&self, name: &str) -> Result<()> {
        match *self {
            ParamRange::Int { lo, hi } if lo <= hi => Ok(()),
            ParamRange::Real { lo, hi } if lo <= hi && lo.is_finite() && hi.is_finite() => Ok(()),
            ParamRange::LogReal { lo, hi } if 0.0 < lo && lo <= hi && hi.is_finite() => Ok(()),
            _ => Err(Error::Search(format!("parameter '{name}' has an invalid range"))),
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            ParamRange::Int { lo, hi } => rng.gen_range(lo..=hi) as f64,
            ParamRange::Real { lo, hi } => lo + rng.gen::<f64>() * (hi - lo),
            ParamRange::LogReal { lo, hi } => {
                (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
            }
        }
    }
}

/// Ordered parameter ranges; sampling draws them in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub params: Vec<(String, ParamRange)>,
}

impl Default for SearchSpace {
    /// The union of the tuned tree parameters plus the imputer's neighbor
    /// count. Growth mode is sampled within the same budget (0 = depth-wise,
    /// 1 = leaf-wise).
    fn default() -> Self {
        SearchSpace {
            params: vec![
                ("growth".into(), ParamRange::Int { lo: 0, hi: 1 }),
                ("max_depth".into(), ParamRange::Int { lo: 3, hi: 15 }),
                ("num_leaves".into(), ParamRange::Int { lo: 20, hi: 50 }),
                ("n_estimators".into(), ParamRange::Int { lo: 50, hi: 250 }),
                ("learning_rate".into(), ParamRange::LogReal { lo: 0.01, hi: 0.2 }),
                ("subsample".into(), ParamRange::Real { lo: 0.5, hi: 1.0 }),
                ("colsample_bytree".into(), ParamRange::Real { lo: 0.6, hi: 1.0 }),
                ("min_child_weight".into(), ParamRange::Real { lo: 1.0, hi: 10.0 }),
                ("min_child_samples".into(), ParamRange::Int { lo: 5, hi: 100 }),
                ("gamma".into(), ParamRange::Real { lo: 0.0, hi: 1.0 }),
                ("reg_alpha".into(), ParamRange::LogReal { lo: 0.01, hi: 2.0 }),
                ("reg_lambda".into(), ParamRange::LogReal { lo: 0.01, hi: 5.0 }),
                ("scale_pos_weight".into(), ParamRange::Real { lo: 0.5, hi: 5.0 }),
                ("knn_k".into(), ParamRange::Int { lo: 3, hi: 30 }),
            ],
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() {
            return Err(Error::Search("empty search space".into()));
        }
        for (name, range) in &self.params {
            range.validate(name)?;
            if !KNOWN_PARAMS.contains(&name.as_str()) {
                return Err(Error::Search(format!("unknown parameter '{name}'")));
            }
        }
        Ok(())
    }

    /// Draw one assignment and apply it over `base`.
    fn sample(&self, base: &PipelineSettings, rng: &mut impl Rng) -> Result<PipelineSettings> {
        let mut out = base.clone();
        for (name, range) in &self.params {
            let v = range.sample(rng);
            apply_param(&mut out, name, v)?;
        }
        Ok(out)
    }
}

const KNOWN_PARAMS: &[&str] = &[
    "growth",
    "max_depth",
    "num_leaves",
    "n_estimators",
    "learning_rate",
    "subsample",
    "colsample_bytree",
    "min_child_weight",
    "min_child_samples",
    "gamma",
    "reg_alpha",
    "reg_lambda",
    "scale_pos_weight",
    "knn_k",
    "smote_k_neighbors",
];

fn apply_param(s: &mut PipelineSettings, name: &str, v: f64) -> Result<()> {
    let as_usize = |v: f64| -> usize { v.round().max(0.0) as usize };
    match name {
        "growth" => {
            s.hp.growth = if as_usize(v) == 0 {
                GrowthMode::DepthWise
            } else {
                GrowthMode::LeafWise
            }
        }
        "max_depth" => s.hp.max_depth = as_usize(v),
        "num_leaves" => s.hp.num_leaves = as_usize(v),
        "n_estimators" => s.hp.n_estimators = as_usize(v),
        "learning_rate" => s.hp.learning_rate = v,
        "subsample" => s.hp.subsample = v,
        "colsample_bytree" => s.hp.colsample_bytree = v,
        "min_child_weight" => s.hp.min_child_weight = v,
        "min_child_samples" => s.hp.min_child_samples = as_usize(v),
        "gamma" => s.hp.gamma = v,
        "reg_alpha" => s.hp.reg_alpha = v,
        "reg_lambda" => s.hp.reg_lambda = v,
        "scale_pos_weight" => s.hp.scale_pos_weight = v,
        "knn_k" => s.knn_k = as_usize(v),
        "smote_k_neighbors" => s.smote.k_neighbors = as_usize(v),
        _ => return Err(Error::Search(format!("unknown parameter '{name}'"))),
    }
    Ok(())
}

/// One evaluated trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub hyperparams: HyperParams,
    pub knn_k: usize,
    pub folds: Vec<MetricsReport>,
    pub mean_bacc: f64,
}

/// Full search history plus the index of the best trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best_index: usize,
    pub trials: Vec<TrialRecord>,
}

impl SearchOutcome {
    pub fn best(&self) -> &TrialRecord {
        &self.trials[self.best_index]
    }

    /// Pipeline settings of the best trial, over the given base.
    pub fn best_settings(&self, base: &PipelineSettings) -> PipelineSettings {
        let b = self.best();
        PipelineSettings {
            hp: b.hyperparams.clone(),
            knn_k: b.knn_k,
            smote: base.smote.clone(),
        }
    }
}

/// Random search over `space` with the given trial budget.
///
/// Each trial's parameters come from `substream_i(seed, "params", trial)`;
/// every trial is evaluated by the same cross-validation plan seeded with
/// `substream(seed, "eval")`, so a trial's score equals what
/// `cross_val_bacc` would return for its settings under that seed. The best
/// trial maximizes mean balanced accuracy; ties keep the earlier trial.
pub fn search(
    table: &DataTable,
    labels: &[u8],
    space: &SearchSpace,
    budget: usize,
    k_folds: usize,
    base: &PipelineSettings,
    seed: u64,
) -> Result<SearchOutcome> {
    if budget == 0 {
        return Err(Error::Search("trial budget must be at least 1".into()));
    }
    space.validate()?;

    let eval_seed = substream(seed, "eval");
    let (ctable, clabels, caches) = prepare_cv(table, labels, k_folds, eval_seed)?;

    let assignments: Result<Vec<PipelineSettings>> = (0..budget)
        .map(|t| {
            let mut rng = rng_for_i(seed, "params", t as u64);
            space.sample(base, &mut rng)
        })
        .collect();
    let assignments = assignments?;

    let trials: Vec<TrialRecord> = assignments
        .into_par_iter()
        .enumerate()
        .map(|(t, settings)| {
            let cv = cv_over_folds(&ctable, &clabels, &caches, &settings, None, eval_seed)?;
            Ok(TrialRecord {
                trial: t,
                hyperparams: settings.hp,
                knn_k: settings.knn_k,
                folds: cv.folds,
                mean_bacc: cv.mean_bacc,
            })
        })
        .collect::<Result<_>>()?;

    let mut best_index = 0;
    for (i, t) in trials.iter().enumerate() {
        if t.mean_bacc > trials[best_index].mean_bacc {
            best_index = i;
        }
    }
    Ok(SearchOutcome { best_index, trials })
}

/// Trial-history export with stable field names.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrialHistoryFile {
    pub stamp: crate::experiment::Stamp,
    pub best_index: usize,
    pub trials: Vec<TrialRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::cross_val_bacc;
    use crate::table::{ColumnData, ColumnSchema};

    fn toy() -> (DataTable, Vec<u8>) {
        use rand::Rng;
        let mut rng = crate::seed::rng_from(31);
        let n = 60;
        let mut col = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let label = u8::from(i % 2 == 0);
            col.push(Some(if label == 1 { 1.5 } else { -1.5 } + rng.gen_range(-1.0..1.0)));
            y.push(label);
        }
        let t = DataTable::new(
            vec![ColumnSchema::numeric("x")],
            vec![ColumnData::Numeric(col)],
        )
        .unwrap();
        (t, y)
    }

    fn tiny_space() -> SearchSpace {
        SearchSpace {
            params: vec![
                ("max_depth".into(), ParamRange::Int { lo: 2, hi: 3 }),
                ("n_estimators".into(), ParamRange::Int { lo: 4, hi: 8 }),
                ("learning_rate".into(), ParamRange::LogReal { lo: 0.05, hi: 0.3 }),
                ("knn_k".into(), ParamRange::Int { lo: 2, hi: 4 }),
            ],
        }
    }

    #[test]
    fn budget_one_returns_single_trial() {
        let (t, y) = toy();
        let out = search(&t, &y, &tiny_space(), 1, 5, &PipelineSettings::default(), 7).unwrap();
        assert_eq!(out.trials.len(), 1);
        assert_eq!(out.best_index, 0);
    }

    #[test]
    fn degenerate_space_ties_to_first_trial() {
        let (t, y) = toy();
        let space = SearchSpace {
            params: vec![("max_depth".into(), ParamRange::Int { lo: 3, hi: 3 })],
        };
        let out = search(&t, &y, &space, 5, 5, &PipelineSettings::default(), 7).unwrap();
        assert_eq!(out.best_index, 0);
        for tr in &out.trials {
            assert_eq!(tr.mean_bacc, out.trials[0].mean_bacc);
        }
    }

    #[test]
    fn best_so_far_is_non_decreasing_and_best_is_max() {
        let (t, y) = toy();
        let out = search(&t, &y, &tiny_space(), 12, 5, &PipelineSettings::default(), 3).unwrap();
        let mut best = f64::NEG_INFINITY;
        for tr in &out.trials {
            best = best.max(tr.mean_bacc);
        }
        assert_eq!(out.best().mean_bacc, best);
        // earlier trial wins ties
        let first_max = out.trials.iter().position(|tr| tr.mean_bacc == best).unwrap();
        assert_eq!(out.best_index, first_max);
    }

    #[test]
    fn trial_score_matches_direct_cross_validation() {
        let (t, y) = toy();
        let seed = 11;
        let out = search(&t, &y, &tiny_space(), 3, 5, &PipelineSettings::default(), seed).unwrap();
        let eval_seed = substream(seed, "eval");
        for tr in &out.trials {
            let settings = PipelineSettings {
                hp: tr.hyperparams.clone(),
                knn_k: tr.knn_k,
                smote: Default::default(),
            };
            let direct = cross_val_bacc(&t, &y, &settings, 5, eval_seed).unwrap();
            assert_eq!(direct.mean_bacc.to_bits(), tr.mean_bacc.to_bits());
            assert_eq!(direct.folds, tr.folds);
        }
    }

    #[test]
    fn empty_space_rejected() {
        let (t, y) = toy();
        let space = SearchSpace { params: vec![] };
        assert!(search(&t, &y, &space, 1, 5, &PipelineSettings::default(), 0).is_err());
    }

    #[test]
    fn samples_respect_bounds() {
        let space = SearchSpace::default();
        let base = PipelineSettings::default();
        for t in 0..50 {
            let mut rng = rng_for_i(99, "params", t);
            let s = space.sample(&base, &mut rng).unwrap();
            assert!((3..=15).contains(&s.hp.max_depth));
            assert!((20..=50).contains(&s.hp.num_leaves));
            assert!((50..=250).contains(&s.hp.n_estimators));
            assert!(s.hp.learning_rate >= 0.01 && s.hp.learning_rate <= 0.2);
            assert!(s.hp.subsample >= 0.5 && s.hp.subsample <= 1.0);
            assert!(s.hp.colsample_bytree >= 0.6 && s.hp.colsample_bytree <= 1.0);
            assert!(s.hp.min_child_weight >= 1.0 && s.hp.min_child_weight <= 10.0);
            assert!((5..=100).contains(&s.hp.min_child_samples));
            assert!(s.hp.gamma >= 0.0 && s.hp.gamma <= 1.0);
            assert!(s.hp.reg_alpha >= 0.01 && s.hp.reg_alpha <= 2.0);
            assert!(s.hp.reg_lambda >= 0.01 && s.hp.reg_lambda <= 5.0);
            assert!(s.hp.scale_pos_weight >= 0.5 && s.hp.scale_pos_weight <= 5.0);
            assert!((3..=30).contains(&s.knn_k));
            assert!(s.hp.validate().is_ok());
        }
    }
}
