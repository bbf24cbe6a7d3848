//! Training the boosted-tree classifier: depth-wise and leaf-wise growth,
//! the per-round loss trace, and bit-exact model persistence.
//!
//! ```bash
//! cargo run --example train_gbdt
//! ```

use rand::Rng;
use shapsel::gbdt::{
    load_model, save_model, train_traced, GrowthMode, HyperParams,
};
use shapsel::matrix::Matrix;
use shapsel::seed::rng_from;

fn two_moons(n: usize, seed: u64) -> (Matrix, Vec<u8>) {
    let mut rng = rng_from(seed);
    let mut rows = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(2 * n);
    for i in 0..2 * n {
        let label = u8::from(i >= n);
        let t: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let (mut px, mut py) = (t.cos(), t.sin());
        if label == 1 {
            px = 1.0 - px;
            py = 0.5 - py;
        }
        rows.push(vec![
            px + rng.gen_range(-0.1..0.1),
            py + rng.gen_range(-0.1..0.1),
        ]);
        labels.push(label);
    }
    (Matrix::from_rows(&rows).unwrap(), labels)
}

fn main() -> shapsel::Result<()> {
    let (x, y) = two_moons(200, 3);
    let names = vec!["px".to_string(), "py".to_string()];

    for growth in [GrowthMode::DepthWise, GrowthMode::LeafWise] {
        let hp = HyperParams {
            growth,
            max_depth: 4,
            num_leaves: 12,
            n_estimators: 40,
            learning_rate: 0.15,
            ..HyperParams::default()
        };
        let (model, trace) = train_traced(&x, &y, &hp, names.clone())?;
        let labels = model.predict_label(&x, 0.5)?;
        let correct = labels.iter().zip(&y).filter(|(a, b)| a == b).count();
        println!(
            "{}: {} trees, training accuracy {:.3}, logloss {:.4} -> {:.4}",
            hp.growth.as_str(),
            model.trees.len(),
            correct as f64 / y.len() as f64,
            trace.round_logloss.first().unwrap(),
            trace.round_logloss.last().unwrap(),
        );
    }

    // Persistence round-trips bit-exactly.
    let hp = HyperParams {
        n_estimators: 10,
        ..HyperParams::default()
    };
    let (model, _) = train_traced(&x, &y, &hp, names)?;
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("model.txt");
    save_model(&model, &path)?;
    let back = load_model(&path)?;
    assert_eq!(model, back);
    let margins = model.predict_margin(&x)?;
    let margins_back = back.predict_margin(&x)?;
    assert_eq!(margins, margins_back);
    println!("saved and reloaded: {} bytes, identical predictions", std::fs::metadata(&path).unwrap().len());
    Ok(())
}
