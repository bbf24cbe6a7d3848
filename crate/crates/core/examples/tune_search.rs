//! Random hyperparameter search over the boosted-tree and imputer
//! parameters, maximizing mean cross-validated balanced accuracy.
//!
//! ```bash
//! cargo run --example tune_search
//! ```

use shapsel::model_selection::{search, ParamRange, SearchSpace};
use shapsel::pipeline::PipelineSettings;
use shapsel::synth::{generate_synthetic, ClassSpec, SynthSpec};
use shapsel::table::{binarize, BinaryScenario};

fn main() -> shapsel::Result<()> {
    let spec = SynthSpec {
        label_name: "status".into(),
        classes: vec![
            ClassSpec {
                name: "case".into(),
                count: 80,
                missing_rate: 0.1,
            },
            ClassSpec {
                name: "control".into(),
                count: 140,
                missing_rate: 0.1,
            },
        ],
        informative_numeric: 3,
        noise_numeric: 5,
        informative_categorical: 0,
        noise_categorical: 0,
        categorical_levels: 2,
        separation: 1.6,
        categorical_tilt: 0.0,
        seed: 31,
    };
    let (table, _) = generate_synthetic(&spec)?;
    let (features, labels) =
        binarize(&table, &BinaryScenario::new("case_vs_control", ["case"], ["control"])?)?;

    // A reduced space keeps this example quick; `SearchSpace::default()`
    // carries the full tuned ranges.
    let space = SearchSpace {
        params: vec![
            ("growth".into(), ParamRange::Int { lo: 0, hi: 1 }),
            ("max_depth".into(), ParamRange::Int { lo: 3, hi: 8 }),
            ("n_estimators".into(), ParamRange::Int { lo: 30, hi: 80 }),
            ("learning_rate".into(), ParamRange::LogReal { lo: 0.02, hi: 0.2 }),
            ("reg_lambda".into(), ParamRange::LogReal { lo: 0.01, hi: 5.0 }),
            ("knn_k".into(), ParamRange::Int { lo: 3, hi: 10 }),
        ],
    };

    let outcome = search(&features, &labels, &space, 20, 5, &PipelineSettings::default(), 77)?;
    println!("{} trials, best is trial {}:", outcome.trials.len(), outcome.best_index);
    let best = outcome.best();
    println!(
        "  growth {}  depth {}  trees {}  lr {:.3}  lambda {:.3}  knn_k {}",
        best.hyperparams.growth.as_str(),
        best.hyperparams.max_depth,
        best.hyperparams.n_estimators,
        best.hyperparams.learning_rate,
        best.hyperparams.reg_lambda,
        best.knn_k,
    );
    println!("  mean BACC {:.4}", best.mean_bacc);

    let mut running_best = f64::NEG_INFINITY;
    for t in &outcome.trials {
        running_best = running_best.max(t.mean_bacc);
        println!("  trial {:>2}: bacc {:.4} (best so far {:.4})", t.trial, t.mean_bacc, running_best);
    }
    Ok(())
}
