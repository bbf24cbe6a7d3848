//! Synthetic tabular data with known ground truth, the substrate for
//! verification runs: informative numeric features are class-conditional
//! Gaussians, informative categoricals have class-dependent level odds,
//! noise features are class-independent, and missing cells are inserted
//! completely at random at a per-class rate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_for;
use crate::table::{ColumnData, ColumnSchema, DataTable};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSpec {
    pub name: String,
    pub count: usize,
    /// Probability that any feature cell of this class's rows is missing.
    #[serde(default)]
    pub missing_rate: f64,
}

fn default_label_name() -> String {
    "class".into()
}

fn default_levels() -> usize {
    2
}

fn default_separation() -> f64 {
    2.0
}

fn default_tilt() -> f64 {
    0.3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(default = "default_label_name")]
    pub label_name: String,
    pub classes: Vec<ClassSpec>,
    #[serde(default)]
    pub informative_numeric: usize,
    #[serde(default)]
    pub noise_numeric: usize,
    #[serde(default)]
    pub informative_categorical: usize,
    #[serde(default)]
    pub noise_categorical: usize,
    #[serde(default = "default_levels")]
    pub categorical_levels: usize,
    /// Per-coordinate mean offset of informative numeric features between
    /// the classes they distinguish.
    #[serde(default = "default_separation")]
    pub separation: f64,
    /// Shift applied to the first level's probability for informative
    /// categoricals, sign alternating with class index.
    #[serde(default = "default_tilt")]
    pub categorical_tilt: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SynthSpec {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Synth(format!("{}: {e}", path.display())))
    }

    fn validate(&self) -> Result<()> {
        if self.classes.len() < 2 {
            return Err(Error::Synth("need at least 2 classes".into()));
        }
        if self.informative_numeric + self.informative_categorical == 0 {
            return Err(Error::Synth("need at least 1 informative feature".into()));
        }
        if self.classes.iter().any(|c| c.count == 0) {
            return Err(Error::Synth("every class needs at least 1 row".into()));
        }
        if self
            .classes
            .iter()
            .any(|c| !(0.0..=1.0).contains(&c.missing_rate))
        {
            return Err(Error::Synth("missing_rate must be in [0, 1]".into()));
        }
        if self.categorical_levels < 2
            && self.informative_categorical + self.noise_categorical > 0
        {
            return Err(Error::Synth("categorical features need at least 2 levels".into()));
        }
        if !(self.categorical_tilt >= 0.0 && self.categorical_tilt <= 0.45) {
            return Err(Error::Synth("categorical_tilt must be in [0, 0.45]".into()));
        }
        Ok(())
    }
}

/// Per-class missingness accounting of a generated table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassMissingReport {
    pub class: String,
    pub count: usize,
    /// Percentage of this class's feature cells that are missing.
    pub missing_pct: f64,
}

/// Ground-truth metadata emitted alongside a generated table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthTruth {
    /// Raw column names of the informative features.
    pub informative: Vec<String>,
    /// Closed-form accuracy of the optimal rule, available for the
    /// two-class, purely numeric case.
    pub bayes_accuracy: Option<f64>,
    pub per_class_missing: Vec<ClassMissingReport>,
}

/// Standard normal via Box-Muller; two uniform draws per sample keeps the
/// stream layout independent of any library distribution internals.
fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// Mean of informative numeric feature `j` for class index `c`: classes
/// take turns carrying the offset, so any two classes differ in every
/// informative coordinate by `separation` at most and at least one.
fn class_mean(spec: &SynthSpec, c: usize, j: usize) -> f64 {
    if j % spec.classes.len() == c {
        spec.separation
    } else {
        0.0
    }
}

/// Closed-form Bayes accuracy for two Gaussian classes with identity
/// covariance and the spec's priors.
fn bayes_accuracy_two_class(spec: &SynthSpec) -> f64 {
    let d2: f64 = (0..spec.informative_numeric)
        .map(|j| {
            let diff = class_mean(spec, 1, j) - class_mean(spec, 0, j);
            diff * diff
        })
        .sum();
    let d = d2.sqrt();
    let n0 = spec.classes[0].count as f64;
    let n1 = spec.classes[1].count as f64;
    let pi0 = n0 / (n0 + n1);
    let pi1 = n1 / (n0 + n1);
    let tau = (pi0 / pi1).ln() / d;
    pi0 * std_normal_cdf(d / 2.0 + tau) + pi1 * std_normal_cdf(d / 2.0 - tau)
}

/// Generate a table per the spec. Column layout: informative numerics,
/// noise numerics, informative categoricals, noise categoricals, label.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<(DataTable, SynthTruth)> {
    spec.validate()?;
    let mut rng = rng_for(spec.seed, "synth");
    let n_rows: usize = spec.classes.iter().map(|c| c.count).sum();

    let mut schema = Vec::new();
    let mut informative = Vec::new();
    for j in 0..spec.informative_numeric {
        let name = format!("num_inf_{j:02}");
        informative.push(name.clone());
        schema.push(ColumnSchema::numeric(&name));
    }
    for j in 0..spec.noise_numeric {
        schema.push(ColumnSchema::numeric(&format!("num_noise_{j:02}")));
    }
    for j in 0..spec.informative_categorical {
        let name = format!("cat_inf_{j:02}");
        informative.push(name.clone());
        schema.push(ColumnSchema::categorical(&name));
    }
    for j in 0..spec.noise_categorical {
        schema.push(ColumnSchema::categorical(&format!("cat_noise_{j:02}")));
    }
    schema.push(ColumnSchema::label(&spec.label_name));

    let n_numeric = spec.informative_numeric + spec.noise_numeric;
    let n_categorical = spec.informative_categorical + spec.noise_categorical;
    let n_features = n_numeric + n_categorical;
    let mut numeric_cols: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(n_rows); n_numeric];
    let mut cat_cols: Vec<Vec<Option<String>>> = vec![Vec::with_capacity(n_rows); n_categorical];
    let mut label_col: Vec<Option<String>> = Vec::with_capacity(n_rows);

    let level_name = |l: usize| -> String {
        char::from_u32('a' as u32 + l as u32)
            .map(|c| c.to_string())
            .unwrap_or_else(|| format!("lv{l}"))
    };

    let mut per_class_missing = Vec::new();
    for (ci, class) in spec.classes.iter().enumerate() {
        let mut missing_cells = 0usize;
        for _ in 0..class.count {
            for j in 0..n_numeric {
                let value = if j < spec.informative_numeric {
                    class_mean(spec, ci, j) + normal(&mut rng)
                } else {
                    normal(&mut rng)
                };
                let cell = if rng.gen::<f64>() < class.missing_rate {
                    missing_cells += 1;
                    None
                } else {
                    Some(value)
                };
                numeric_cols[j].push(cell);
            }
            for j in 0..n_categorical {
                let level = if j < spec.informative_categorical {
                    // first level's odds tilted up for even class indices,
                    // down for odd ones
                    let sign = if ci % 2 == 0 { 1.0 } else { -1.0 };
                    let p0 = 1.0 / spec.categorical_levels as f64 + sign * spec.categorical_tilt;
                    if rng.gen::<f64>() < p0 {
                        0
                    } else {
                        1 + rng.gen_range(0..spec.categorical_levels - 1)
                    }
                } else {
                    rng.gen_range(0..spec.categorical_levels)
                };
                let cell = if rng.gen::<f64>() < class.missing_rate {
                    missing_cells += 1;
                    None
                } else {
                    Some(level_name(level))
                };
                cat_cols[j].push(cell);
            }
            label_col.push(Some(class.name.clone()));
        }
        per_class_missing.push(ClassMissingReport {
            class: class.name.clone(),
            count: class.count,
            missing_pct: if n_features == 0 || class.count == 0 {
                0.0
            } else {
                100.0 * missing_cells as f64 / (class.count * n_features) as f64
            },
        });
    }

    let mut columns: Vec<ColumnData> = Vec::with_capacity(schema.len());
    for col in numeric_cols {
        columns.push(ColumnData::Numeric(col));
    }
    for col in cat_cols {
        columns.push(ColumnData::Categorical(col));
    }
    columns.push(ColumnData::Categorical(label_col));

    let table = DataTable::new(schema, columns)?;
    let bayes_accuracy = (spec.classes.len() == 2
        && spec.informative_categorical == 0
        && spec.informative_numeric > 0)
        .then(|| bayes_accuracy_two_class(spec));

    Ok((
        table,
        SynthTruth {
            informative,
            bayes_accuracy,
            per_class_missing,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_class_spec(missing: f64) -> SynthSpec {
        SynthSpec {
            label_name: "class".into(),
            classes: vec![
                ClassSpec {
                    name: "pos".into(),
                    count: 200,
                    missing_rate: missing,
                },
                ClassSpec {
                    name: "neg".into(),
                    count: 200,
                    missing_rate: missing,
                },
            ],
            informative_numeric: 4,
            noise_numeric: 3,
            informative_categorical: 0,
            noise_categorical: 0,
            categorical_levels: 2,
            separation: 3.5,
            categorical_tilt: 0.3,
            seed: 5,
        }
    }

    #[test]
    fn zero_missing_rate_gives_complete_table() {
        let (t, truth) = generate_synthetic(&two_class_spec(0.0)).unwrap();
        assert!(!t.has_missing());
        assert_eq!(t.n_rows(), 400);
        for r in &truth.per_class_missing {
            assert_eq!(r.missing_pct, 0.0);
        }
    }

    #[test]
    fn well_separated_gaussians_have_high_bayes_accuracy() {
        // d = separation * sqrt(informative) = 3.5 * 2 = 7 -> Phi(3.5) > 0.999
        let (_, truth) = generate_synthetic(&two_class_spec(0.0)).unwrap();
        let bayes = truth.bayes_accuracy.unwrap();
        assert!(bayes >= 0.99, "bayes accuracy {bayes}");
    }

    #[test]
    fn equal_priors_bayes_matches_phi_of_half_distance() {
        let mut spec = two_class_spec(0.0);
        spec.informative_numeric = 1;
        spec.separation = 2.0;
        let (_, truth) = generate_synthetic(&spec).unwrap();
        // d = 2, equal priors: accuracy = Phi(1)
        let expect = std_normal_cdf(1.0);
        assert!((truth.bayes_accuracy.unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn per_class_missingness_tracks_configuration() {
        let mut spec = two_class_spec(0.0);
        spec.classes[0].missing_rate = 0.4227;
        spec.classes[1].missing_rate = 0.1078;
        let (t, truth) = generate_synthetic(&spec).unwrap();
        assert!(t.has_missing());
        let pos = &truth.per_class_missing[0];
        let neg = &truth.per_class_missing[1];
        assert!((pos.missing_pct - 42.27).abs() < 3.0, "{}", pos.missing_pct);
        assert!((neg.missing_pct - 10.78).abs() < 3.0, "{}", neg.missing_pct);
        // label column never missing
        assert_eq!(t.column(t.label_column().unwrap()).n_missing(), 0);
    }

    #[test]
    fn deterministic_for_seed() {
        let spec = two_class_spec(0.2);
        let (a, _) = generate_synthetic(&spec).unwrap();
        let (b, _) = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
        let mut spec2 = spec.clone();
        spec2.seed = 6;
        let (c, _) = generate_synthetic(&spec2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = two_class_spec(0.0);
        spec.classes.truncate(1);
        assert!(generate_synthetic(&spec).is_err());

        let mut spec = two_class_spec(0.0);
        spec.informative_numeric = 0;
        assert!(generate_synthetic(&spec).is_err());

        let mut spec = two_class_spec(0.0);
        spec.classes[0].missing_rate = 1.5;
        assert!(generate_synthetic(&spec).is_err());
    }

    #[test]
    fn categorical_levels_and_tilt() {
        let mut spec = two_class_spec(0.0);
        spec.informative_categorical = 2;
        spec.noise_categorical = 1;
        let (t, truth) = generate_synthetic(&spec).unwrap();
        assert!(truth.bayes_accuracy.is_none());
        assert!(truth.informative.contains(&"cat_inf_00".to_string()));
        let ci = t.column_index("cat_inf_00").unwrap();
        if let ColumnData::Categorical(v) = t.column(ci) {
            let a_in_pos = v[..200].iter().filter(|c| c.as_deref() == Some("a")).count();
            let a_in_neg = v[200..].iter().filter(|c| c.as_deref() == Some("a")).count();
            // tilt 0.3: P(a|pos) = 0.8, P(a|neg) = 0.2
            assert!(a_in_pos > 120, "{a_in_pos}");
            assert!(a_in_neg < 80, "{a_in_neg}");
        } else {
            panic!("expected categorical column");
        }
    }
}
