//! The metric suite and leak-free cross-validation of the whole pipeline.
//!
//! ```bash
//! cargo run --example evaluate_metrics
//! ```

use shapsel::metrics::{compute_metrics, ConfusionMatrix};
use shapsel::pipeline::{cross_val_bacc, PipelineSettings};
use shapsel::synth::{generate_synthetic, ClassSpec, SynthSpec};
use shapsel::table::binarize;
use shapsel::table::BinaryScenario;

fn main() -> shapsel::Result<()> {
    // Metric suite from raw counts.
    let cm = ConfusionMatrix::new(100, 3, 37, 0);
    let m = compute_metrics(&cm)?;
    println!(
        "acc {:.4}  bacc {:.4}  precision {:.4}  sensitivity {:.4}  specificity {:.4}  f1 {:.4}",
        m.acc, m.bacc, m.precision, m.sensitivity, m.specificity, m.f1
    );

    // A degenerate fold: no positives at all. Undefined ratios report as
    // zero and are flagged instead of silently inflating a mean.
    let degenerate = compute_metrics(&ConfusionMatrix::new(0, 0, 20, 0))?;
    println!(
        "degenerate fold: sensitivity {} (flagged: {})",
        degenerate.sensitivity, degenerate.zero_division.sensitivity
    );

    // Cross-validated pipeline score on a synthetic two-class table with
    // missing cells: imputers, encoder and SMOTE fit per fold on the
    // fold-train rows only.
    let spec = SynthSpec {
        label_name: "status".into(),
        classes: vec![
            ClassSpec {
                name: "case".into(),
                count: 90,
                missing_rate: 0.15,
            },
            ClassSpec {
                name: "control".into(),
                count: 150,
                missing_rate: 0.1,
            },
        ],
        informative_numeric: 3,
        noise_numeric: 4,
        informative_categorical: 1,
        noise_categorical: 1,
        categorical_levels: 2,
        separation: 2.5,
        categorical_tilt: 0.25,
        seed: 9,
    };
    let (table, _) = generate_synthetic(&spec)?;
    let scenario = BinaryScenario::new("case_vs_control", ["case"], ["control"])?;
    let (features, labels) = binarize(&table, &scenario)?;

    let mut settings = PipelineSettings::default();
    settings.hp.n_estimators = 40;
    let cv = cross_val_bacc(&features, &labels, &settings, 5, 2024)?;
    println!("5-fold mean BACC: {:.4}", cv.mean_bacc);
    for (f, fold) in cv.folds.iter().enumerate() {
        println!("  fold {f}: bacc {:.4}  sens {:.4}  spec {:.4}", fold.bacc, fold.sensitivity, fold.specificity);
    }
    Ok(())
}
