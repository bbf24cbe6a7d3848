//! Confusion-matrix metric suite: accuracy, balanced accuracy, precision,
//! sensitivity (recall), specificity, F-score.
//!
//! Conventions: balanced accuracy is the mean of sensitivity and
//! specificity, precision is TP/(TP+FP). Any metric whose denominator is
//! zero is reported as 0 with a flag, so degenerate folds cannot silently
//! inflate scores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionMatrix {
    pub fn new(true_pos: usize, false_pos: usize, true_neg: usize, false_neg: usize) -> Self {
        ConfusionMatrix {
            true_pos,
            false_pos,
            true_neg,
            false_neg,
        }
    }

    pub fn from_labels(truth: &[u8], predicted: &[u8]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::Metrics(format!(
                "{} labels but {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        let mut cm = ConfusionMatrix::new(0, 0, 0, 0);
        for (&t, &p) in truth.iter().zip(predicted) {
            match (t, p) {
                (1, 1) => cm.true_pos += 1,
                (0, 1) => cm.false_pos += 1,
                (0, 0) => cm.true_neg += 1,
                (1, 0) => cm.false_neg += 1,
                _ => {
                    return Err(Error::Metrics(format!(
                        "labels must be 0/1, found truth={t} predicted={p}"
                    )))
                }
            }
        }
        Ok(cm)
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Which metrics hit a 0/0 denominator and were defined as 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroDivisionFlags {
    pub precision: bool,
    pub sensitivity: bool,
    pub specificity: bool,
    pub f1: bool,
}

impl ZeroDivisionFlags {
    pub fn any(&self) -> bool {
        self.precision || self.sensitivity || self.specificity || self.f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub acc: f64,
    pub bacc: f64,
    pub precision: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub f1: f64,
    pub zero_division: ZeroDivisionFlags,
}

fn ratio(num: usize, den: usize, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Compute the metric suite from counts. Errors when the matrix is empty.
pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Metrics("empty confusion matrix".into()));
    }
    let mut flags = ZeroDivisionFlags::default();
    let acc = (cm.true_pos + cm.true_neg) as f64 / total as f64;
    let sensitivity = ratio(cm.true_pos, cm.true_pos + cm.false_neg, &mut flags.sensitivity);
    let specificity = ratio(cm.true_neg, cm.true_neg + cm.false_pos, &mut flags.specificity);
    let precision = ratio(cm.true_pos, cm.true_pos + cm.false_pos, &mut flags.precision);
    let bacc = (sensitivity + specificity) / 2.0;
    let f1 = if precision + sensitivity == 0.0 {
        flags.f1 = true;
        0.0
    } else {
        2.0 * precision * sensitivity / (precision + sensitivity)
    };
    Ok(MetricsReport {
        acc,
        bacc,
        precision,
        sensitivity,
        specificity,
        f1,
        zero_division: flags,
    })
}

impl MetricsReport {
    /// Element-wise mean of several reports (cross-validation folds);
    /// zero-division flags are OR-ed.
    pub fn mean_of(reports: &[MetricsReport]) -> Result<MetricsReport> {
        if reports.is_empty() {
            return Err(Error::Metrics("cannot average zero reports".into()));
        }
        let n = reports.len() as f64;
        let mut flags = ZeroDivisionFlags::default();
        for r in reports {
            flags.precision |= r.zero_division.precision;
            flags.sensitivity |= r.zero_division.sensitivity;
            flags.specificity |= r.zero_division.specificity;
            flags.f1 |= r.zero_division.f1;
        }
        Ok(MetricsReport {
            acc: reports.iter().map(|r| r.acc).sum::<f64>() / n,
            bacc: reports.iter().map(|r| r.bacc).sum::<f64>() / n,
            precision: reports.iter().map(|r| r.precision).sum::<f64>() / n,
            sensitivity: reports.iter().map(|r| r.sensitivity).sum::<f64>() / n,
            specificity: reports.iter().map(|r| r.specificity).sum::<f64>() / n,
            f1: reports.iter().map(|r| r.f1).sum::<f64>() / n,
            zero_division: flags,
        })
    }
}
