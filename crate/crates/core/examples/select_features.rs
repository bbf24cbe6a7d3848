//! SHAP-guided dimensionality reduction: rank features by mean |SHAP|,
//! sweep the top-N from 2 to all features, and pick the N with the best
//! balanced accuracy.
//!
//! ```bash
//! cargo run --example select_features
//! ```

use shapsel::pipeline::{final_fit_eval, PipelineSettings};
use shapsel::select::{sweep, SweepMode};
use shapsel::shap::{rank_features, shap_values};
use shapsel::split::stratified_split;
use shapsel::synth::{generate_synthetic, ClassSpec, SynthSpec};
use shapsel::table::{binarize, BinaryScenario};

fn main() -> shapsel::Result<()> {
    // 3 informative + 9 noise features.
    let spec = SynthSpec {
        label_name: "status".into(),
        classes: vec![
            ClassSpec {
                name: "case".into(),
                count: 150,
                missing_rate: 0.05,
            },
            ClassSpec {
                name: "control".into(),
                count: 150,
                missing_rate: 0.05,
            },
        ],
        informative_numeric: 3,
        noise_numeric: 9,
        informative_categorical: 0,
        noise_categorical: 0,
        categorical_levels: 2,
        separation: 2.2,
        categorical_tilt: 0.0,
        seed: 5,
    };
    let (table, truth) = generate_synthetic(&spec)?;
    let (features, labels) =
        binarize(&table, &BinaryScenario::new("case_vs_control", ["case"], ["control"])?)?;

    let (train_idx, test_idx) = stratified_split(&labels, 0.2, 1)?;
    let train = features.select_rows(&train_idx);
    let test = features.select_rows(&test_idx);
    let y_train: Vec<u8> = train_idx.iter().map(|&i| labels[i]).collect();
    let y_test: Vec<u8> = test_idx.iter().map(|&i| labels[i]).collect();

    let mut settings = PipelineSettings::default();
    settings.hp.n_estimators = 50;
    let fit_seed = 99;

    // Entire model, then its SHAP ranking on the training partition.
    let (_, entire) = final_fit_eval(&train, &y_train, &test, &y_test, &settings, None, fit_seed)?;
    println!("entire model ({} features): test BACC {:.4}", entire.feature_names.len(), entire.metrics.bacc);

    let shap = shap_values(&entire.ensemble, &entire.x_train)?;
    let ranking = rank_features(&shap, &entire.feature_names)?;
    println!("top of the ranking (truth: {:?}):", truth.informative);
    for (name, score) in ranking.entries.iter().take(5) {
        println!("  {score:>8.4}  {name}");
    }

    let result = sweep(
        &train,
        &y_train,
        &test,
        &y_test,
        &ranking,
        &settings,
        SweepMode::Paper,
        5,
        fit_seed,
        123,
    )?;
    println!("sweep curve (N -> BACC):");
    for p in &result.curve {
        let marker = if p.n == result.best_n { "  <- best" } else { "" };
        println!("  {:>2} -> {:.4}{marker}", p.n, p.metrics.bacc);
    }
    println!("selected features: {:?}", result.selected_features);
    Ok(())
}
