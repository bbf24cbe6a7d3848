//! SHAP-guided dimensionality reduction: retrain on the top-N ranked
//! features for N from 2 to all, and pick the N that maximizes balanced
//! accuracy (ties to the smallest N).
//!
//! Two scoring modes: `Paper` scores each N on the held-out test split,
//! keeping the original train/test split; `Cv` scores by k-fold
//! cross-validation on the training split only, which avoids choosing N on
//! test data. The default everywhere is `Cv`; `Paper` exists for faithful
//! protocol reproduction.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encode::Encoder;
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::pipeline::{
    cv_over_folds, fit_on_prepared, prepare_cv, prepare_split, PipelineSettings,
};
use crate::shap::FeatureRanking;
use crate::table::DataTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Score every N on the held-out test split.
    Paper,
    /// Score every N by cross-validation on the training split only.
    Cv,
}

impl SweepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMode::Paper => "paper",
            SweepMode::Cv => "cv",
        }
    }
}

impl std::str::FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(SweepMode::Paper),
            "cv" => Ok(SweepMode::Cv),
            other => Err(Error::Config(format!(
                "unknown sweep mode '{other}' (expected 'paper' or 'cv')"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    /// One point per N, ascending from 2 to the total feature count.
    pub curve: Vec<SweepPoint>,
    /// Smallest N attaining the maximum balanced accuracy on the curve.
    pub best_n: usize,
    /// The top `best_n` encoded feature names, ranking order.
    pub selected_features: Vec<String>,
}

fn ranking_matches_encoder(ranking: &FeatureRanking, encoder: &Encoder) -> Result<()> {
    let ranked: BTreeSet<&str> = ranking.names().collect();
    let encoded: BTreeSet<&str> = encoder.encoded_names().iter().map(String::as_str).collect();
    if ranked != encoded {
        let missing: Vec<&str> = encoded.difference(&ranked).copied().take(5).collect();
        let extra: Vec<&str> = ranked.difference(&encoded).copied().take(5).collect();
        return Err(Error::Selection(format!(
            "ranking does not cover the encoded features (missing: {missing:?}, unknown: {extra:?})"
        )));
    }
    Ok(())
}

/// Top-N encoded feature indices per the ranking, in ranking order.
pub fn select_features(encoder: &Encoder, ranking: &FeatureRanking, n: usize) -> Result<Vec<usize>> {
    ranking_matches_encoder(ranking, encoder)?;
    let total = encoder.n_encoded();
    if n < 2 || n > total {
        return Err(Error::Selection(format!(
            "N must be between 2 and {total}, got {n}"
        )));
    }
    let index_of = |name: &str| {
        encoder
            .encoded_names()
            .iter()
            .position(|e| e == name)
            .expect("ranking validated against encoder")
    };
    Ok(ranking.top(n).map(index_of).collect())
}

/// Like `select_features`, but any selected one-hot indicator pulls in its
/// whole parent-column group. Walks the ranking, adding complete groups,
/// until at least `n` features are selected; the result can therefore
/// exceed `n` when the final group is larger than the remainder.
pub fn select_features_grouped(
    encoder: &Encoder,
    ranking: &FeatureRanking,
    n: usize,
) -> Result<Vec<usize>> {
    ranking_matches_encoder(ranking, encoder)?;
    let total = encoder.n_encoded();
    if n < 2 || n > total {
        return Err(Error::Selection(format!(
            "N must be between 2 and {total}, got {n}"
        )));
    }
    let mut selected: Vec<usize> = Vec::new();
    let mut in_set = vec![false; total];
    for name in ranking.names() {
        if selected.len() >= n {
            break;
        }
        let idx = encoder
            .encoded_names()
            .iter()
            .position(|e| e == name)
            .expect("ranking validated against encoder");
        if in_set[idx] {
            continue;
        }
        for g in encoder.group_of(idx) {
            if !in_set[g] {
                in_set[g] = true;
                selected.push(g);
            }
        }
    }
    Ok(selected)
}

/// Retrain the pipeline on the top-N features for every N and score each
/// model under the chosen mode. `fit_seed` must match the seed used for the
/// full-model fit so that the N = total point reproduces it exactly;
/// `cv_seed` drives fold assignment in `Cv` mode.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    train: &DataTable,
    y_train: &[u8],
    test: &DataTable,
    y_test: &[u8],
    ranking: &FeatureRanking,
    settings: &PipelineSettings,
    mode: SweepMode,
    k_folds: usize,
    fit_seed: u64,
    cv_seed: u64,
) -> Result<SweepResult> {
    if ranking.is_empty() {
        return Err(Error::Selection("empty feature ranking".into()));
    }
    let total = ranking.len();
    if total < 2 {
        return Err(Error::Selection(format!(
            "need at least 2 encoded features to sweep, have {total}"
        )));
    }

    let curve: Vec<SweepPoint> = match mode {
        SweepMode::Paper => {
            let prepared = prepare_split(train, y_train, test, y_test, settings.knn_k)?;
            ranking_matches_encoder(ranking, &prepared.preprocessor.encoder)?;
            (2..=total)
                .into_par_iter()
                .map(|n| {
                    let subset: BTreeSet<String> =
                        ranking.top(n).map(str::to_string).collect();
                    let outcome = fit_on_prepared(&prepared, settings, Some(&subset), fit_seed)?;
                    Ok(SweepPoint {
                        n,
                        metrics: outcome.metrics,
                    })
                })
                .collect::<Result<_>>()?
        }
        SweepMode::Cv => {
            // Validate coverage against an encoder fitted the same way the
            // full-model pipeline fits one.
            let prepared = prepare_split(train, y_train, test, y_test, settings.knn_k)?;
            ranking_matches_encoder(ranking, &prepared.preprocessor.encoder)?;
            let (ctable, clabels, caches) = prepare_cv(train, y_train, k_folds, cv_seed)?;
            (2..=total)
                .into_par_iter()
                .map(|n| {
                    let subset: BTreeSet<String> =
                        ranking.top(n).map(str::to_string).collect();
                    let cv = cv_over_folds(&ctable, &clabels, &caches, settings, Some(&subset), cv_seed)?;
                    Ok(SweepPoint {
                        n,
                        metrics: MetricsReport::mean_of(&cv.folds)?,
                    })
                })
                .collect::<Result<_>>()?
        }
    };

    let mut best_n = curve[0].n;
    let mut best_bacc = curve[0].metrics.bacc;
    for p in &curve[1..] {
        if p.metrics.bacc > best_bacc {
            best_bacc = p.metrics.bacc;
            best_n = p.n;
        }
    }

    Ok(SweepResult {
        curve,
        best_n,
        selected_features: ranking.top(best_n).map(str::to_string).collect(),
    })
}

/// Plot-ready curve export: one row per N.
pub fn write_sweep_csv(
    result: &SweepResult,
    out: &mut impl std::io::Write,
    stamp: Option<&str>,
) -> Result<()> {
    let werr = |e: std::io::Error| Error::Selection(format!("write sweep export: {e}"));
    if let Some(s) = stamp {
        writeln!(out, "# {s}").map_err(werr)?;
    }
    writeln!(out, "n,bacc,acc,precision,sensitivity,specificity,f1").map_err(werr)?;
    for p in &result.curve {
        let m = &p.metrics;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.n, m.bacc, m.acc, m.precision, m.sensitivity, m.specificity, m.f1
        )
        .map_err(werr)?;
    }
    Ok(())
}
