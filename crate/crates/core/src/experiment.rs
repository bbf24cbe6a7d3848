//! Experiment orchestration: configuration, the staged protocol
//! (prep, tune, train, explain, select), artifact persistence, and the
//! per-scenario report.
//!
//! All randomness flows from the config seed through named substreams
//! (`"split"`, `"search"`, `"fit"`, `"sweep"`), so stages re-run in
//! isolation behave exactly as they do inside a full run, and two runs of
//! the same config produce byte-identical artifacts.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StageExt};
use crate::gbdt::{model_to_string, HyperParams};
use crate::metrics::MetricsReport;
use crate::model_selection::{search, SearchOutcome, SearchSpace, TrialHistoryFile};
use crate::pipeline::{
    final_fit_eval, fit_on_prepared, FitOutcome, PipelineSettings, PreparedSplit,
};
use crate::select::{sweep, SweepMode, SweepResult};
use crate::seed::substream;
use crate::shap::{rank_features, shap_values, write_shap_csv, FeatureRanking, ShapMatrix};
use crate::smote::SmoteConfig;
use crate::split::stratified_split;
use crate::synth::{generate_synthetic, ClassMissingReport, SynthSpec, SynthTruth};
use crate::table::{
    binarize, drop_high_missing, load_csv, load_schema, write_csv, BinaryScenario, DataTable,
    PruneAudit, SchemaFile,
};

pub const TOOL_NAME: &str = "shapsel";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Artifact filenames within an experiment's output directory.
pub mod files {
    pub const PREP: &str = "prep.json";
    pub const TRIALS: &str = "trials.json";
    pub const BEST_PARAMS: &str = "best_params.json";
    pub const MODEL_ENTIRE: &str = "model.txt";
    pub const TRAIN: &str = "train.json";
    pub const SHAP: &str = "shap.csv";
    pub const RANKING: &str = "ranking.json";
    pub const SWEEP: &str = "sweep.csv";
    pub const SELECTION: &str = "selection.json";
    pub const MODEL_REDUCED: &str = "model_reduced.txt";
    pub const REPORT: &str = "report.json";
}

/// Every output file carries this: tool version, seed, and a digest of the
/// effective configuration (output directory excluded, so runs into
/// different directories still compare byte-identical).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config_digest: String,
}

impl Stamp {
    pub fn line(&self) -> String {
        format!(
            "{} v{} seed={} config={}",
            self.tool, self.version, self.seed, self.config_digest
        )
    }
}

fn digest64(text: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn default_missing_threshold() -> f64 {
    0.45
}

fn default_test_fraction() -> f64 {
    0.2
}

fn default_cv_folds() -> usize {
    5
}

fn default_trial_budget() -> usize {
    100
}

fn default_sweep_mode() -> SweepMode {
    SweepMode::Cv
}

fn default_smote_k() -> usize {
    5
}

fn default_smote_ratio() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoteSettings {
    #[serde(default = "default_smote_k")]
    pub k_neighbors: usize,
    #[serde(default = "default_smote_ratio")]
    pub target_ratio: f64,
}

impl Default for SmoteSettings {
    fn default() -> Self {
        SmoteSettings {
            k_neighbors: default_smote_k(),
            target_ratio: default_smote_ratio(),
        }
    }
}

/// Declarative description of one experiment. Defaults reproduce the
/// standard protocol: 45% missingness pruning, 80/20 stratified split,
/// 5-fold cross-validation, 100 search trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub schema: PathBuf,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Single-scenario form.
    #[serde(default)]
    pub scenario: Option<BinaryScenario>,
    /// Multi-scenario form; select one by name with `--scenario`.
    #[serde(default)]
    pub scenarios: Vec<BinaryScenario>,
    #[serde(default = "default_missing_threshold")]
    pub missing_threshold: f64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_cv_folds")]
    pub cv_folds: usize,
    #[serde(default = "default_trial_budget")]
    pub trial_budget: usize,
    #[serde(default)]
    pub smote: SmoteSettings,
    #[serde(default = "default_sweep_mode")]
    pub sweep_mode: SweepMode,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        // Paths in the config are relative to the config file's directory.
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(cfg.rebase(base))
    }

    fn rebase(mut self, base: &Path) -> Self {
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut self.dataset);
        rebase(&mut self.schema);
        rebase(&mut self.out_dir);
        self
    }

    /// Pick the scenario to run: by name when given, otherwise the single
    /// configured one.
    pub fn resolve_scenario(&self, name: Option<&str>) -> Result<BinaryScenario> {
        let all: Vec<&BinaryScenario> = self.scenario.iter().chain(&self.scenarios).collect();
        if all.is_empty() {
            return Err(Error::Config("no scenario configured".into()));
        }
        let chosen = match name {
            Some(n) => all
                .iter()
                .find(|s| s.name == n)
                .copied()
                .ok_or_else(|| {
                    let known: Vec<&str> = all.iter().map(|s| s.name.as_str()).collect();
                    Error::Config(format!("unknown scenario '{n}' (configured: {known:?})"))
                })?,
            None => {
                if all.len() > 1 {
                    let known: Vec<&str> = all.iter().map(|s| s.name.as_str()).collect();
                    return Err(Error::Config(format!(
                        "multiple scenarios configured ({known:?}); pick one with --scenario"
                    )));
                }
                all[0]
            }
        };
        chosen.validate()?;
        Ok(chosen.clone())
    }

    pub fn base_settings(&self) -> PipelineSettings {
        PipelineSettings {
            hp: HyperParams::default(),
            knn_k: 5,
            smote: SmoteConfig {
                k_neighbors: self.smote.k_neighbors,
                target_ratio: self.smote.target_ratio,
                seed: 0,
            },
        }
    }

    fn digest(&self, scenario: &BinaryScenario) -> String {
        let mut key = String::new();
        key.push_str(&format!("dataset={}\n", self.dataset.display()));
        key.push_str(&format!("schema={}\n", self.schema.display()));
        key.push_str(&format!("seed={}\n", self.seed));
        key.push_str(&format!("scenario={}\n", scenario.name));
        key.push_str(&format!("positive={:?}\n", scenario.positive));
        key.push_str(&format!("negative={:?}\n", scenario.negative));
        key.push_str(&format!("missing_threshold={}\n", self.missing_threshold));
        key.push_str(&format!("test_fraction={}\n", self.test_fraction));
        key.push_str(&format!("cv_folds={}\n", self.cv_folds));
        key.push_str(&format!("trial_budget={}\n", self.trial_budget));
        key.push_str(&format!(
            "smote={},{}\n",
            self.smote.k_neighbors, self.smote.target_ratio
        ));
        key.push_str(&format!("sweep_mode={}\n", self.sweep_mode.as_str()));
        digest64(&key)
    }

    pub fn stamp(&self, scenario: &BinaryScenario) -> Stamp {
        Stamp {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            seed: self.seed,
            config_digest: self.digest(scenario),
        }
    }
}

/// Write-temp-then-rename so partially written artifacts never appear.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Report(format!("serialize: {e}")))?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// Resolved experiment: config plus the scenario under test.
pub struct ExperimentContext {
    pub cfg: ExperimentConfig,
    pub scenario: BinaryScenario,
    pub stamp: Stamp,
}

impl ExperimentContext {
    pub fn new(cfg: ExperimentConfig, scenario_name: Option<&str>) -> Result<Self> {
        let scenario = cfg.resolve_scenario(scenario_name)?;
        if !cfg.dataset.exists() {
            return Err(Error::Config(format!(
                "dataset file {} does not exist",
                cfg.dataset.display()
            )));
        }
        if !cfg.schema.exists() {
            return Err(Error::Config(format!(
                "schema file {} does not exist",
                cfg.schema.display()
            )));
        }
        let stamp = cfg.stamp(&scenario);
        Ok(ExperimentContext {
            cfg,
            scenario,
            stamp,
        })
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.cfg.out_dir.join(name)
    }

    fn ensure_out_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.cfg.out_dir).map_err(|e| Error::io(&self.cfg.out_dir, e))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        self.ensure_out_dir()?;
        write_atomic(&self.out_path(name), &to_json_pretty(value)?)
    }

    fn read_json<T: for<'de> Deserialize<'de>>(&self, name: &str) -> Result<T> {
        let path = self.out_path(name);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Report(format!("{}: {e}", path.display())))
    }
}

/// Missingness accounting of the loaded dataset plus the pruning audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrepReport {
    pub stamp: Stamp,
    pub n_rows: usize,
    pub n_feature_columns: usize,
    pub n_feature_columns_kept: usize,
    pub threshold: f64,
    /// (column, missing fraction) of every dropped column.
    pub dropped_columns: Vec<(String, f64)>,
    pub per_class_missing: Vec<ClassMissingReport>,
}

fn per_class_missing(table: &DataTable) -> Result<Vec<ClassMissingReport>> {
    let classes = table.class_of_rows()?;
    let feature_cols = table.feature_columns();
    let mut order: Vec<&str> = Vec::new();
    let mut counts: std::collections::BTreeMap<&str, (usize, usize)> = Default::default();
    for (r, class) in classes.iter().enumerate() {
        if !counts.contains_key(class) {
            order.push(class);
        }
        let entry = counts.entry(class).or_insert((0, 0));
        entry.0 += 1;
        for &c in &feature_cols {
            if table.row_cell_missing(r, c) {
                entry.1 += 1;
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|class| {
            let (count, missing) = counts[class];
            ClassMissingReport {
                class: class.to_string(),
                count,
                missing_pct: if count * feature_cols.len() == 0 {
                    0.0
                } else {
                    100.0 * missing as f64 / (count * feature_cols.len()) as f64
                },
            }
        })
        .collect())
}

impl ExperimentContext {
    /// Load, prune, and account for missingness.
    pub fn load_pruned(&self) -> Result<(DataTable, PruneAudit, Vec<ClassMissingReport>)> {
        let schema_file = load_schema(&self.cfg.schema)?;
        let table = load_csv(&self.cfg.dataset, &schema_file.columns, &schema_file.missing())?;
        let per_class = per_class_missing(&table)?;
        let (pruned, audit) = drop_high_missing(&table, self.cfg.missing_threshold)?;
        Ok((pruned, audit, per_class))
    }

    /// Binarize and split 80/20 stratified (seed substream `"split"`).
    pub fn split_data(&self, pruned: &DataTable) -> Result<SplitData> {
        let (ftable, labels) = binarize(pruned, &self.scenario)?;
        let (train_idx, test_idx) = stratified_split(
            &labels,
            self.cfg.test_fraction,
            substream(self.cfg.seed, "split"),
        )?;
        Ok(SplitData {
            train: ftable.select_rows(&train_idx),
            y_train: train_idx.iter().map(|&i| labels[i]).collect(),
            test: ftable.select_rows(&test_idx),
            y_test: test_idx.iter().map(|&i| labels[i]).collect(),
        })
    }
}

pub struct SplitData {
    pub train: DataTable,
    pub y_train: Vec<u8>,
    pub test: DataTable,
    pub y_test: Vec<u8>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BestParamsFile {
    pub stamp: Stamp,
    pub best_trial_index: usize,
    pub cv_mean_bacc: f64,
    pub settings: PipelineSettings,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TrainFile {
    pub stamp: Stamp,
    pub variant: String,
    pub n_features: usize,
    pub metrics: MetricsReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RankingFile {
    pub stamp: Stamp,
    pub base_value: f64,
    pub ranking: FeatureRanking,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SelectionFile {
    pub stamp: Stamp,
    pub sweep_mode: String,
    pub best_n: usize,
    pub selected_features: Vec<String>,
    pub reduced_metrics: MetricsReport,
}

/// One Table-style report row: a model variant with its feature count and
/// held-out metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantRow {
    pub model: String,
    pub algorithm: String,
    pub n: usize,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactIndex {
    pub prep: String,
    pub trials: String,
    pub best_params: String,
    pub model_entire: String,
    pub train: String,
    pub shap: String,
    pub ranking: String,
    pub sweep: String,
    pub selection: String,
    pub model_reduced: String,
}

impl Default for ArtifactIndex {
    fn default() -> Self {
        ArtifactIndex {
            prep: files::PREP.into(),
            trials: files::TRIALS.into(),
            best_params: files::BEST_PARAMS.into(),
            model_entire: files::MODEL_ENTIRE.into(),
            train: files::TRAIN.into(),
            shap: files::SHAP.into(),
            ranking: files::RANKING.into(),
            sweep: files::SWEEP.into(),
            selection: files::SELECTION.into(),
            model_reduced: files::MODEL_REDUCED.into(),
        }
    }
}

/// The per-scenario experiment report: reduced and entire model rows plus
/// everything needed to reproduce them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub stamp: Stamp,
    pub experiment: String,
    pub positive_classes: Vec<String>,
    pub negative_classes: Vec<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub n_encoded_features: usize,
    pub sweep_mode: String,
    pub trial_budget: usize,
    /// Reduced row first, then entire.
    pub rows: Vec<VariantRow>,
    pub best_hyperparams: HyperParams,
    pub knn_k: usize,
    pub best_trial_index: usize,
    pub cv_mean_bacc: f64,
    pub selected_features: Vec<String>,
    pub dropped_columns: Vec<(String, f64)>,
    pub per_class_missing: Vec<ClassMissingReport>,
    pub artifacts: ArtifactIndex,
}

impl ExperimentReport {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Report(format!("{}: {e}", path.display())))
    }
}

impl ExperimentContext {
    fn run_tune(&self, split: &SplitData) -> Result<(SearchOutcome, PipelineSettings)> {
        let base = self.cfg.base_settings();
        let outcome = search(
            &split.train,
            &split.y_train,
            &SearchSpace::default(),
            self.cfg.trial_budget,
            self.cfg.cv_folds,
            &base,
            substream(self.cfg.seed, "search"),
        )?;
        let settings = outcome.best_settings(&base);
        self.write_json(
            files::TRIALS,
            &TrialHistoryFile {
                stamp: self.stamp.clone(),
                best_index: outcome.best_index,
                trials: outcome.trials.clone(),
            },
        )?;
        self.write_json(
            files::BEST_PARAMS,
            &BestParamsFile {
                stamp: self.stamp.clone(),
                best_trial_index: outcome.best_index,
                cv_mean_bacc: outcome.best().mean_bacc,
                settings: settings.clone(),
            },
        )?;
        Ok((outcome, settings))
    }

    fn run_train(
        &self,
        split: &SplitData,
        settings: &PipelineSettings,
    ) -> Result<(PreparedSplit, FitOutcome)> {
        let fit_seed = substream(self.cfg.seed, "fit");
        let (prepared, outcome) = final_fit_eval(
            &split.train,
            &split.y_train,
            &split.test,
            &split.y_test,
            settings,
            None,
            fit_seed,
        )?;
        self.ensure_out_dir()?;
        write_atomic(
            &self.out_path(files::MODEL_ENTIRE),
            model_to_string(&outcome.ensemble).as_bytes(),
        )?;
        self.write_json(
            files::TRAIN,
            &TrainFile {
                stamp: self.stamp.clone(),
                variant: "entire".into(),
                n_features: outcome.feature_names.len(),
                metrics: outcome.metrics,
            },
        )?;
        Ok((prepared, outcome))
    }

    fn run_explain(&self, entire: &FitOutcome) -> Result<(ShapMatrix, FeatureRanking)> {
        let shap = shap_values(&entire.ensemble, &entire.x_train)?;
        let ranking = rank_features(&shap, &entire.feature_names)?;
        self.ensure_out_dir()?;
        let mut buf = Vec::new();
        write_shap_csv(&shap, &entire.feature_names, &mut buf, Some(&self.stamp.line()))?;
        write_atomic(&self.out_path(files::SHAP), &buf)?;
        self.write_json(
            files::RANKING,
            &RankingFile {
                stamp: self.stamp.clone(),
                base_value: shap.base_value,
                ranking: ranking.clone(),
            },
        )?;
        Ok((shap, ranking))
    }

    fn run_select(
        &self,
        split: &SplitData,
        prepared: &PreparedSplit,
        ranking: &FeatureRanking,
        settings: &PipelineSettings,
    ) -> Result<(SweepResult, FitOutcome)> {
        let fit_seed = substream(self.cfg.seed, "fit");
        let result = sweep(
            &split.train,
            &split.y_train,
            &split.test,
            &split.y_test,
            ranking,
            settings,
            self.cfg.sweep_mode,
            self.cfg.cv_folds,
            fit_seed,
            substream(self.cfg.seed, "sweep"),
        )?;
        let subset: BTreeSet<String> = result.selected_features.iter().cloned().collect();
        let reduced = fit_on_prepared(prepared, settings, Some(&subset), fit_seed)?;

        self.ensure_out_dir()?;
        let mut buf = Vec::new();
        crate::select::write_sweep_csv(&result, &mut buf, Some(&self.stamp.line()))?;
        write_atomic(&self.out_path(files::SWEEP), &buf)?;
        write_atomic(
            &self.out_path(files::MODEL_REDUCED),
            model_to_string(&reduced.ensemble).as_bytes(),
        )?;
        self.write_json(
            files::SELECTION,
            &SelectionFile {
                stamp: self.stamp.clone(),
                sweep_mode: self.cfg.sweep_mode.as_str().into(),
                best_n: result.best_n,
                selected_features: result.selected_features.clone(),
                reduced_metrics: reduced.metrics,
            },
        )?;
        Ok((result, reduced))
    }
}

/// Run the full protocol for one scenario and write every artifact.
pub fn run_experiment(cfg: &ExperimentConfig, scenario_name: Option<&str>) -> Result<ExperimentReport> {
    let ctx = ExperimentContext::new(cfg.clone(), scenario_name).stage("config")?;

    let (pruned, audit, per_class) = ctx.load_pruned().stage("prep")?;
    let n_feature_raw = per_class_feature_count(&audit, &pruned);
    let prep = PrepReport {
        stamp: ctx.stamp.clone(),
        n_rows: pruned.n_rows(),
        n_feature_columns: n_feature_raw,
        n_feature_columns_kept: pruned.feature_columns().len(),
        threshold: audit.threshold,
        dropped_columns: audit.dropped.clone(),
        per_class_missing: per_class.clone(),
    };
    ctx.write_json(files::PREP, &prep).stage("prep")?;

    let split = ctx.split_data(&pruned).stage("split")?;
    let (outcome, settings) = ctx.run_tune(&split).stage("tune")?;
    let (prepared, entire) = ctx.run_train(&split, &settings).stage("train")?;
    let (_, ranking) = ctx.run_explain(&entire).stage("explain")?;
    let (sweep_result, reduced) = ctx
        .run_select(&split, &prepared, &ranking, &settings)
        .stage("select")?;

    let report = ExperimentReport {
        stamp: ctx.stamp.clone(),
        experiment: ctx.scenario.name.clone(),
        positive_classes: ctx.scenario.positive.iter().cloned().collect(),
        negative_classes: ctx.scenario.negative.iter().cloned().collect(),
        n_train: split.train.n_rows(),
        n_test: split.test.n_rows(),
        n_encoded_features: entire.feature_names.len(),
        sweep_mode: ctx.cfg.sweep_mode.as_str().into(),
        trial_budget: ctx.cfg.trial_budget,
        rows: vec![
            VariantRow {
                model: "reduced".into(),
                algorithm: settings.hp.growth.as_str().into(),
                n: sweep_result.best_n,
                metrics: reduced.metrics,
            },
            VariantRow {
                model: "entire".into(),
                algorithm: settings.hp.growth.as_str().into(),
                n: entire.feature_names.len(),
                metrics: entire.metrics,
            },
        ],
        best_hyperparams: settings.hp.clone(),
        knn_k: settings.knn_k,
        best_trial_index: outcome.best_index,
        cv_mean_bacc: outcome.best().mean_bacc,
        selected_features: sweep_result.selected_features.clone(),
        dropped_columns: audit.dropped.clone(),
        per_class_missing: per_class,
        artifacts: ArtifactIndex::default(),
    };
    ctx.write_json(files::REPORT, &report).stage("report")?;
    Ok(report)
}

fn per_class_feature_count(audit: &PruneAudit, pruned: &DataTable) -> usize {
    pruned.feature_columns().len() + audit.dropped.len()
}

/// `prep` command: load, prune, audit.
pub fn cmd_prep(cfg: &ExperimentConfig, scenario_name: Option<&str>) -> Result<PrepReport> {
    let ctx = ExperimentContext::new(cfg.clone(), scenario_name).stage("config")?;
    let (pruned, audit, per_class) = ctx.load_pruned().stage("prep")?;
    let prep = PrepReport {
        stamp: ctx.stamp.clone(),
        n_rows: pruned.n_rows(),
        n_feature_columns: per_class_feature_count(&audit, &pruned),
        n_feature_columns_kept: pruned.feature_columns().len(),
        threshold: audit.threshold,
        dropped_columns: audit.dropped.clone(),
        per_class_missing: per_class,
    };
    ctx.write_json(files::PREP, &prep).stage("prep")?;
    Ok(prep)
}

/// `tune` command: search and persist the trial history and best parameters.
pub fn cmd_tune(cfg: &ExperimentConfig, scenario_name: Option<&str>) -> Result<BestParamsFile> {
    let ctx = ExperimentContext::new(cfg.clone(), scenario_name).stage("config")?;
    let (pruned, _, _) = ctx.load_pruned().stage("prep")?;
    let split = ctx.split_data(&pruned).stage("split")?;
    let (outcome, settings) = ctx.run_tune(&split).stage("tune")?;
    Ok(BestParamsFile {
        stamp: ctx.stamp.clone(),
        best_trial_index: outcome.best_index,
        cv_mean_bacc: outcome.best().mean_bacc,
        settings,
    })
}

fn read_best_params(ctx: &ExperimentContext) -> Result<PipelineSettings> {
    let file: BestParamsFile = ctx.read_json(files::BEST_PARAMS).map_err(|_| {
        Error::Config(format!(
            "missing or unreadable {}; run `tune` first",
            ctx.out_path(files::BEST_PARAMS).display()
        ))
    })?;
    Ok(file.settings)
}

/// `train` command: final fit with the tuned parameters, persistence, test
/// metrics.
pub fn cmd_train(cfg: &ExperimentConfig, scenario_name: Option<&str>) -> Result<TrainFile> {
    let ctx = ExperimentContext::new(cfg.clone(), scenario_name).stage("config")?;
    let settings = read_best_params(&ctx).stage("train")?;
    let (pruned, _, _) = ctx.load_pruned().stage("prep")?;
    let split = ctx.split_data(&pruned).stage("split")?;
    let (_, outcome) = ctx.run_train(&split, &settings).stage("train")?;
    Ok(TrainFile {
        stamp: ctx.stamp.clone(),
        variant: "entire".into(),
        n_features: outcome.feature_names.len(),
        metrics: outcome.metrics,
    })
}

/// `explain` command: SHAP export and feature ranking for the trained
/// entire model.
pub fn cmd_explain(cfg: &ExperimentConfig, scenario_name: Option<&str>) -> Result<RankingFile> {
    let ctx = ExperimentContext::new(cfg.clone(), scenario_name).stage("config")?;
    let settings = read_best_params(&ctx).stage("explain")?;
    let (pruned, _, _) = ctx.load_pruned().stage("prep")?;
    let split = ctx.split_data(&pruned).stage("split")?;
    let (_, outcome) = ctx.run_train(&split, &settings).stage("train")?;
    let (shap, ranking) = ctx.run_explain(&outcome).stage("explain")?;
    Ok(RankingFile {
        stamp: ctx.stamp.clone(),
        base_value: shap.base_value,
        ranking,
    })
}

/// `select` command: N-sweep, reduced model, selection report.
pub fn cmd_select(cfg: &ExperimentConfig, scenario_name: Option<&str>) -> Result<SelectionFile> {
    let ctx = ExperimentContext::new(cfg.clone(), scenario_name).stage("config")?;
    let settings = read_best_params(&ctx).stage("select")?;
    let ranking_file: RankingFile = ctx.read_json(files::RANKING).map_err(|_| {
        Error::Config(format!(
            "missing or unreadable {}; run `explain` first",
            ctx.out_path(files::RANKING).display()
        ))
    })?;
    let (pruned, _, _) = ctx.load_pruned().stage("prep")?;
    let split = ctx.split_data(&pruned).stage("split")?;
    let prepared = crate::pipeline::prepare_split(
        &split.train,
        &split.y_train,
        &split.test,
        &split.y_test,
        settings.knn_k,
    )
    .stage("select")?;
    let (result, reduced) = ctx
        .run_select(&split, &prepared, &ranking_file.ranking, &settings)
        .stage("select")?;
    Ok(SelectionFile {
        stamp: ctx.stamp.clone(),
        sweep_mode: ctx.cfg.sweep_mode.as_str().into(),
        best_n: result.best_n,
        selected_features: result.selected_features,
        reduced_metrics: reduced.metrics,
    })
}

/// Files written by the `synth` command.
#[derive(Debug, Serialize, Deserialize)]
pub struct SynthOutput {
    pub stamp: Stamp,
    pub dataset: String,
    pub schema: String,
    pub truth: SynthTruth,
}

/// `synth` command: generate a dataset, its schema sidecar and ground truth
/// into `out_dir`.
pub fn cmd_synth(spec_path: &Path, out_dir: &Path, seed_override: Option<u64>) -> Result<SynthOutput> {
    let mut spec = SynthSpec::load(spec_path).stage("synth")?;
    if let Some(s) = seed_override {
        spec.seed = s;
    }
    let (table, truth) = generate_synthetic(&spec).stage("synth")?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let data_path = out_dir.join("synthetic.csv");
    write_csv(&table, &data_path).stage("synth")?;

    let schema_file = SchemaFile {
        missing_tokens: None,
        columns: table.schema().to_vec(),
    };
    crate::table::save_schema(&schema_file, &out_dir.join("schema.toml")).stage("synth")?;

    let stamp = Stamp {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        seed: spec.seed,
        config_digest: digest64(&format!("{spec:?}")),
    };
    let output = SynthOutput {
        stamp,
        dataset: "synthetic.csv".into(),
        schema: "schema.toml".into(),
        truth,
    };
    write_atomic(&out_dir.join("truth.json"), &to_json_pretty(&output)?)?;
    Ok(output)
}
