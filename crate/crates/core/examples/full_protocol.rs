//! The full experiment protocol end to end on synthetic data: prune, split,
//! tune, train, explain, sweep, report. A small trial budget keeps this
//! example quick; the CLI runs the same code path.
//!
//! ```bash
//! cargo run --example full_protocol
//! ```

use shapsel::experiment::{
    cmd_synth, run_experiment, ExperimentConfig, SmoteSettings,
};
use shapsel::report::format_summary;
use shapsel::select::SweepMode;
use shapsel::table::BinaryScenario;

fn main() -> shapsel::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");

    // Generate a dataset the same way `shapsel synth` does.
    let spec_path = dir.path().join("synth.toml");
    std::fs::write(
        &spec_path,
        r#"
label_name = "disease"
seed = 21
informative_numeric = 4
noise_numeric = 6
informative_categorical = 2
noise_categorical = 2
separation = 2.2
categorical_tilt = 0.25

[[classes]]
name = "condition_a"
count = 180
missing_rate = 0.2

[[classes]]
name = "condition_b"
count = 120
missing_rate = 0.1
"#,
    )
    .expect("write synth spec");
    let data_dir = dir.path().join("data");
    let synth = cmd_synth(&spec_path, &data_dir, None)?;
    println!("generated {:?}", synth.truth.per_class_missing);

    let cfg = ExperimentConfig {
        dataset: data_dir.join("synthetic.csv"),
        schema: data_dir.join("schema.toml"),
        out_dir: dir.path().join("out"),
        seed: 7,
        scenario: Some(BinaryScenario::new(
            "a_vs_b",
            ["condition_a"],
            ["condition_b"],
        )?),
        scenarios: vec![],
        missing_threshold: 0.45,
        test_fraction: 0.2,
        cv_folds: 5,
        trial_budget: 8, // small budget for a quick example
        smote: SmoteSettings::default(),
        sweep_mode: SweepMode::Cv,
    };

    let report = run_experiment(&cfg, None)?;
    print!("{}", format_summary(std::slice::from_ref(&report))?);
    println!(
        "best trial {} (cv mean BACC {:.4}), selected {:?}",
        report.best_trial_index, report.cv_mean_bacc, report.selected_features
    );

    let mut files: Vec<String> = std::fs::read_dir(cfg.out_dir)
        .expect("out dir")
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    println!("artifacts: {files:?}");
    Ok(())
}
