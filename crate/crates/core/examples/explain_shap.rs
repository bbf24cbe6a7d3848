//! Exact SHAP attribution for a trained ensemble: the efficiency axiom,
//! verification against the exponential-time oracle, and the mean-|SHAP|
//! feature ranking.
//!
//! ```bash
//! cargo run --example explain_shap
//! ```

use rand::Rng;
use shapsel::gbdt::{train, HyperParams};
use shapsel::matrix::Matrix;
use shapsel::seed::rng_from;
use shapsel::shap::{rank_features, shap_oracle, shap_values};

fn main() -> shapsel::Result<()> {
    // Five features; only the first three carry signal.
    let mut rng = rng_from(17);
    let n = 300;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let y: Vec<u8> = rows
        .iter()
        .map(|r| u8::from(1.5 * r[0] - r[1] + 0.5 * r[2] > 0.0))
        .collect();
    let x = Matrix::from_rows(&rows)?;
    let names: Vec<String> = ["pressure", "flow", "ph", "noise_a", "noise_b"]
        .iter()
        .map(|s| s.to_string())
        .collect();

    let hp = HyperParams {
        n_estimators: 60,
        max_depth: 4,
        ..HyperParams::default()
    };
    let model = train(&x, &y, &hp, names.clone())?;

    let shap = shap_values(&model, &x)?;
    println!("base value (expected margin): {:.4}", shap.base_value);

    // Efficiency: base + sum of attributions reconstructs each margin.
    let margins = model.predict_margin(&x)?;
    let row0: f64 = shap.base_value + shap.values.row(0).iter().sum::<f64>();
    println!(
        "row 0: margin {:.6}, base + sum(phi) {:.6} (diff {:.1e})",
        margins[0],
        row0,
        (margins[0] - row0).abs()
    );

    // The exponential-time oracle agrees with the path algorithm.
    let slow = shap_oracle(&model, x.row(0))?;
    let max_diff = slow
        .iter()
        .enumerate()
        .map(|(c, v)| (shap.values.get(0, c) - v).abs())
        .fold(0.0f64, f64::max)
;
    println!("oracle agreement on row 0: max |diff| = {max_diff:.2e}");

    let ranking = rank_features(&shap, &names)?;
    println!("features by mean |SHAP|:");
    for (name, score) in &ranking.entries {
        println!("  {score:>8.4}  {name}");
    }
    Ok(())
}
