//! End-to-end tests of the command-line interface: exit codes, artifact
//! layout, staged-vs-full equivalence, and the merged report table.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shapsel"))
}

fn write_inputs(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let synth_spec = r#"
label_name = "status"
seed = 77
informative_numeric = 3
noise_numeric = 4
informative_categorical = 1
noise_categorical = 1
separation = 2.4
categorical_tilt = 0.25

[[classes]]
name = "case"
count = 120
missing_rate = 0.15

[[classes]]
name = "control"
count = 180
missing_rate = 0.1
"#;
    let spec_path = dir.join("synth.toml");
    std::fs::write(&spec_path, synth_spec).unwrap();
    let data_dir = dir.join("data");
    let status = bin()
        .args(["synth", "--config"])
        .arg(&spec_path)
        .arg("--out")
        .arg(&data_dir)
        .status()
        .unwrap();
    assert!(status.success());

    let config = format!(
        r#"
dataset = "data/synthetic.csv"
schema = "data/schema.toml"
out_dir = "out"
seed = 5
trial_budget = 3

[scenario]
name = "case_vs_control"
positive = ["case"]
negative = ["control"]
"#
    );
    let cfg_path = dir.join("exp.toml");
    std::fs::write(&cfg_path, config).unwrap();
    (cfg_path, data_dir)
}

#[test]
fn synth_writes_dataset_schema_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    let (_, data_dir) = write_inputs(dir.path());
    for f in ["synthetic.csv", "schema.toml", "truth.json"] {
        assert!(data_dir.join(f).exists(), "missing {f}");
    }
    let csv = std::fs::read_to_string(data_dir.join("synthetic.csv")).unwrap();
    assert_eq!(csv.lines().count(), 301); // header + 300 rows
}

#[test]
fn run_produces_all_artifacts_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = write_inputs(dir.path());
    let output = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    for column in ["Exp.", "Model", "BACC(%)", "Spec.(%)"] {
        assert!(stdout.contains(column), "missing {column} in:\n{stdout}");
    }
    let out = dir.path().join("out");
    for f in [
        "prep.json",
        "trials.json",
        "best_params.json",
        "model.txt",
        "train.json",
        "shap.csv",
        "ranking.json",
        "sweep.csv",
        "selection.json",
        "model_reduced.txt",
        "report.json",
    ] {
        assert!(out.join(f).exists(), "missing artifact {f}");
    }
    // every artifact self-stamps with tool, seed and config digest
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("\"tool\": \"shapsel\""));
    assert!(report.contains("\"seed\": 5"));
    let shap = std::fs::read_to_string(out.join("shap.csv")).unwrap();
    assert!(shap.starts_with("# shapsel v"));
}

#[test]
fn staged_commands_reproduce_the_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = write_inputs(dir.path());

    let full_out = dir.path().join("full");
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&full_out)
        .status()
        .unwrap();
    assert!(status.success());

    let staged_out = dir.path().join("staged");
    for sub in ["prep", "tune", "train", "explain", "select"] {
        let status = bin()
            .args([sub, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&staged_out)
            .status()
            .unwrap();
        assert!(status.success(), "stage {sub} failed");
    }

    for f in [
        "prep.json",
        "trials.json",
        "best_params.json",
        "model.txt",
        "train.json",
        "shap.csv",
        "ranking.json",
        "sweep.csv",
        "selection.json",
        "model_reduced.txt",
    ] {
        let a = std::fs::read(full_out.join(f)).unwrap();
        let b = std::fs::read(staged_out.join(f)).unwrap();
        assert_eq!(a, b, "staged {f} differs from full-run artifact");
    }
}

#[test]
fn report_merges_multiple_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, _) = write_inputs(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for (out, seed) in [(&out_a, "5"), (&out_b, "6")] {
        let status = bin()
            .args(["run", "--config"])
            .arg(&cfg)
            .args(["--seed", seed])
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let summary_path = dir.path().join("summary.txt");
    let output = bin()
        .arg("report")
        .arg(out_a.join("report.json"))
        .arg(out_b.join("report.json"))
        .arg("--out")
        .arg(&summary_path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    // header + separator + 2 runs x 2 rows
    assert_eq!(stdout.lines().count(), 6);
    assert_eq!(std::fs::read_to_string(&summary_path).unwrap(), stdout);
}

#[test]
fn missing_config_fails_without_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = bin()
        .args(["run", "--config"])
        .arg(dir.path().join("nope.toml"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(!out.exists(), "partial outputs written on config error");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("error"), "{stderr}");
}

#[test]
fn missing_dataset_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(
        &cfg_path,
        r#"
dataset = "data/none.csv"
schema = "data/none.toml"
out_dir = "out"

[scenario]
name = "x"
positive = ["a"]
negative = ["b"]
"#,
    )
    .unwrap();
    let output = bin()
        .args(["run", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("stage config"), "{stderr}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_flags_and_commands_print_usage() {
    let output = bin().arg("frobnicate").output().unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.to_lowercase().contains("usage"), "{stderr}");

    let output = bin().args(["run", "--bogus"]).output().unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.to_lowercase().contains("usage"), "{stderr}");
}

#[test]
fn scenario_flag_selects_from_multi_scenario_config() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _) = write_inputs(dir.path());
    let config = r#"
dataset = "data/synthetic.csv"
schema = "data/schema.toml"
out_dir = "out_multi"
seed = 5
trial_budget = 2

[[scenarios]]
name = "case_vs_control"
positive = ["case"]
negative = ["control"]

[[scenarios]]
name = "control_vs_case"
positive = ["control"]
negative = ["case"]
"#;
    let cfg_path = dir.path().join("multi.toml");
    std::fs::write(&cfg_path, config).unwrap();

    // without --scenario: ambiguous
    let output = bin().args(["prep", "--config"]).arg(&cfg_path).output().unwrap();
    assert!(!output.status.success());

    let status = bin()
        .args(["prep", "--config"])
        .arg(&cfg_path)
        .args(["--scenario", "control_vs_case"])
        .status()
        .unwrap();
    assert!(status.success());
}
