//! SHAP-guided feature selection for binary tabular classification.
//!
//! The crate reconstructs a complete, reproducible modelling pipeline:
//!
//! 1. [`table`] — column-typed tables with explicit missing cells, CSV
//!    ingestion with a schema sidecar, missingness pruning, label
//!    binarization; [`split`] — stratified splitting and k-fold assignment.
//! 2. [`impute`] — K-nearest-neighbors imputation for numeric columns
//!    (masked Euclidean distances) and training-set mode for categoricals.
//! 3. [`encode`] — standardization and one-hot encoding fitted on training
//!    data only.
//! 4. [`smote`] — synthetic minority oversampling on the encoded matrix.
//! 5. [`gbdt`] — second-order gradient boosting with logistic loss and
//!    depth-wise or leaf-wise growth, plus bit-exact model persistence.
//! 6. [`shap`] — exact path-dependent TreeSHAP attribution, an
//!    exponential-time oracle for verification, and mean-|SHAP| feature
//!    ranking.
//! 7. [`model_selection`] — stratified cross-validation and random
//!    hyperparameter search maximizing mean balanced accuracy; [`metrics`]
//!    — the confusion-matrix metric suite.
//! 8. [`select`] — the top-N feature sweep; [`experiment`] / [`report`] —
//!    the orchestrated protocol with persisted, byte-reproducible
//!    artifacts; [`synth`] — synthetic data with known ground truth.
//!
//! Determinism is a design constraint throughout: every source of
//! randomness derives from a single seed through named substreams
//! ([`seed`]), ties break by index, and reruns of the same configuration
//! produce byte-identical outputs. See the `examples/` directory for one
//! runnable walkthrough per capability.

pub mod encode;
pub mod error;
pub mod experiment;
pub mod gbdt;
pub mod impute;
pub mod matrix;
pub mod metrics;
pub mod model_selection;
pub mod pipeline;
pub mod report;
pub mod select;
pub mod seed;
pub mod shap;
pub mod smote;
pub mod split;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
pub use matrix::Matrix;
