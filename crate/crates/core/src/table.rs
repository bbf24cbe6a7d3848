//! Column-typed tabular data with explicit missing cells.
//!
//! `DataTable` is the universal currency of the pipeline: CSV ingestion,
//! missingness pruning, label binarization and the imputers all speak it.
//! Missing is an explicit `None`, never a sentinel value.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a column holds real numbers or symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// How a column participates in modelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRole {
    Feature,
    ClassLabel,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub role: ColumnRole,
}

impl ColumnSchema {
    pub fn numeric(name: &str) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::Numeric,
            role: ColumnRole::Feature,
        }
    }

    pub fn categorical(name: &str) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::Categorical,
            role: ColumnRole::Feature,
        }
    }

    pub fn label(name: &str) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::Categorical,
            role: ColumnRole::ClassLabel,
        }
    }
}

/// One column of cells; `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_missing(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.iter().filter(|c| c.is_none()).count(),
            ColumnData::Categorical(v) => v.iter().filter(|c| c.is_none()).count(),
        }
    }

    fn is_missing(&self, row: usize) -> bool {
        match self {
            ColumnData::Numeric(v) => v[row].is_none(),
            ColumnData::Categorical(v) => v[row].is_none(),
        }
    }

    fn select_rows(&self, keep: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(keep.iter().map(|&r| v[r]).collect()),
            ColumnData::Categorical(v) => {
                ColumnData::Categorical(keep.iter().map(|&r| v[r].clone()).collect())
            }
        }
    }
}

/// Column-typed table; all columns share the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    schema: Vec<ColumnSchema>,
    columns: Vec<ColumnData>,
    n_rows: usize,
}

impl DataTable {
    /// Build a table, validating the schema/data invariants: matching
    /// lengths, unique names, kind agreement, at most one class label, and
    /// no missing cells in the label column.
    pub fn new(schema: Vec<ColumnSchema>, columns: Vec<ColumnData>) -> Result<Self> {
        if schema.len() != columns.len() {
            return Err(Error::Table(format!(
                "{} schema columns but {} data columns",
                schema.len(),
                columns.len()
            )));
        }
        let n_rows = columns.first().map_or(0, ColumnData::len);
        let mut seen = BTreeSet::new();
        let mut labels = 0usize;
        for (cs, col) in schema.iter().zip(&columns) {
            if !seen.insert(cs.name.clone()) {
                return Err(Error::Schema(format!("duplicate column name '{}'", cs.name)));
            }
            if col.len() != n_rows {
                return Err(Error::Table(format!(
                    "column '{}' has {} rows, expected {}",
                    cs.name,
                    col.len(),
                    n_rows
                )));
            }
            let kind_ok = matches!(
                (cs.kind, col),
                (ColumnKind::Numeric, ColumnData::Numeric(_))
                    | (ColumnKind::Categorical, ColumnData::Categorical(_))
            );
            if !kind_ok {
                return Err(Error::Schema(format!(
                    "column '{}' data does not match declared kind",
                    cs.name
                )));
            }
            if cs.role == ColumnRole::ClassLabel {
                labels += 1;
                if col.n_missing() > 0 {
                    return Err(Error::Table(format!(
                        "class label column '{}' has missing cells",
                        cs.name
                    )));
                }
            }
        }
        if labels > 1 {
            return Err(Error::Schema(format!("{labels} class label columns, expected one")));
        }
        Ok(DataTable {
            schema,
            columns,
            n_rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub fn column(&self, idx: usize) -> &ColumnData {
        &self.columns[idx]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    /// Index of the unique class-label column.
    pub fn label_column(&self) -> Result<usize> {
        let mut it = self
            .schema
            .iter()
            .enumerate()
            .filter(|(_, c)| c.role == ColumnRole::ClassLabel);
        match (it.next(), it.next()) {
            (Some((i, _)), None) => Ok(i),
            (None, _) => Err(Error::Schema("no class label column".into())),
            _ => Err(Error::Schema("multiple class label columns".into())),
        }
    }

    /// Class symbol of every row, from the label column.
    pub fn class_of_rows(&self) -> Result<Vec<&str>> {
        let li = self.label_column()?;
        match &self.columns[li] {
            ColumnData::Categorical(v) => Ok(v
                .iter()
                .map(|c| c.as_deref().expect("label column validated non-missing"))
                .collect()),
            ColumnData::Numeric(_) => Err(Error::Schema(
                "class label column must be categorical".into(),
            )),
        }
    }

    /// Observed class symbols with counts, sorted by symbol.
    pub fn class_counts(&self) -> Result<BTreeMap<String, usize>> {
        let mut counts = BTreeMap::new();
        for c in self.class_of_rows()? {
            *counts.entry(c.to_string()).or_insert(0) += 1;
        }
        Ok(counts)
    }

    /// Indices of feature-role columns, in schema order.
    pub fn feature_columns(&self) -> Vec<usize> {
        self.schema
            .iter()
            .enumerate()
            .filter(|(_, c)| c.role == ColumnRole::Feature)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn missing_fraction(&self, col: usize) -> f64 {
        if self.n_rows == 0 {
            return 0.0;
        }
        self.columns[col].n_missing() as f64 / self.n_rows as f64
    }

    /// Materialize a row subset (in the given order).
    pub fn select_rows(&self, keep: &[usize]) -> DataTable {
        DataTable {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.select_rows(keep)).collect(),
            n_rows: keep.len(),
        }
    }

    /// Materialize a column subset (in the given order).
    pub fn select_columns(&self, keep: &[usize]) -> DataTable {
        DataTable {
            schema: keep.iter().map(|&c| self.schema[c].clone()).collect(),
            columns: keep.iter().map(|&c| self.columns[c].clone()).collect(),
            n_rows: self.n_rows,
        }
    }

    pub fn has_missing(&self) -> bool {
        self.columns.iter().any(|c| c.n_missing() > 0)
    }

    /// True if any cell of the row is missing.
    pub fn row_has_missing(&self, row: usize) -> bool {
        self.columns.iter().any(|c| c.is_missing(row))
    }

    /// True if the given cell is missing.
    pub fn row_cell_missing(&self, row: usize, col: usize) -> bool {
        self.columns[col].is_missing(row)
    }
}

/// Cell spellings that parse as missing. Matching is exact (no trimming
/// beyond what the CSV layer already did).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingTokens(pub Vec<String>);

impl Default for MissingTokens {
    fn default() -> Self {
        MissingTokens(vec![String::new(), "NA".into(), "NaN".into()])
    }
}

impl MissingTokens {
    pub fn matches(&self, cell: &str) -> bool {
        self.0.iter().any(|t| t == cell)
    }
}

/// Load an RFC-4180 CSV whose header matches `schema` names in order.
///
/// Empty fields and configured missing tokens parse to missing cells.
/// Numeric parse failures are hard errors naming the row and column, never
/// silent missing values.
pub fn load_csv(path: &Path, schema: &[ColumnSchema], missing: &MissingTokens) -> Result<DataTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?
        .clone();
    if headers.len() != schema.len() {
        return Err(Error::Load(format!(
            "{}: header has {} columns, schema expects {}",
            path.display(),
            headers.len(),
            schema.len()
        )));
    }
    for (h, s) in headers.iter().zip(schema) {
        if h != s.name {
            return Err(Error::Load(format!(
                "{}: unknown column '{}' where schema expects '{}'",
                path.display(),
                h,
                s.name
            )));
        }
    }

    let mut columns: Vec<ColumnData> = schema
        .iter()
        .map(|s| match s.kind {
            ColumnKind::Numeric => ColumnData::Numeric(Vec::new()),
            ColumnKind::Categorical => ColumnData::Categorical(Vec::new()),
        })
        .collect();

    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
        if record.len() != schema.len() {
            return Err(Error::Load(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                row_idx + 1,
                record.len(),
                schema.len()
            )));
        }
        for ((cell, cs), col) in record.iter().zip(schema).zip(&mut columns) {
            let is_missing = missing.matches(cell);
            match col {
                ColumnData::Numeric(v) => {
                    if is_missing {
                        v.push(None);
                    } else {
                        let parsed: f64 = cell.trim().parse().map_err(|_| {
                            Error::Load(format!(
                                "{}: row {}, column '{}': cannot parse '{}' as numeric",
                                path.display(),
                                row_idx + 1,
                                cs.name,
                                cell
                            ))
                        })?;
                        v.push(Some(parsed));
                    }
                }
                ColumnData::Categorical(v) => {
                    if is_missing {
                        v.push(None);
                    } else {
                        v.push(Some(cell.to_string()));
                    }
                }
            }
        }
    }

    DataTable::new(schema.to_vec(), columns)
}

/// Write a table back out as CSV (missing cells become empty fields).
pub fn write_csv(table: &DataTable, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(table.schema().iter().map(|c| c.name.as_str()))
        .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    for r in 0..table.n_rows() {
        let mut record: Vec<String> = Vec::with_capacity(table.n_cols());
        for c in 0..table.n_cols() {
            record.push(match table.column(c) {
                ColumnData::Numeric(v) => v[r].map(|x| format!("{x}")).unwrap_or_default(),
                ColumnData::Categorical(v) => v[r].clone().unwrap_or_default(),
            });
        }
        w.write_record(&record)
            .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Schema sidecar file: column inventory plus missing-token list, TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemaFile {
    #[serde(default)]
    pub missing_tokens: Option<Vec<String>>,
    #[serde(rename = "column")]
    pub columns: Vec<ColumnSchema>,
}

impl SchemaFile {
    pub fn missing(&self) -> MissingTokens {
        self.missing_tokens
            .clone()
            .map(MissingTokens)
            .unwrap_or_default()
    }
}

pub fn load_schema(path: &Path) -> Result<SchemaFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed: SchemaFile = toml::from_str(&text)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    if parsed.columns.is_empty() {
        return Err(Error::Schema(format!("{}: no columns", path.display())));
    }
    Ok(parsed)
}

pub fn save_schema(schema: &SchemaFile, path: &Path) -> Result<()> {
    let text = toml::to_string(schema)
        .map_err(|e| Error::Schema(format!("serialize schema: {e}")))?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Audit record for `drop_high_missing`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PruneAudit {
    pub threshold: f64,
    /// (column name, observed missing fraction) for each dropped column.
    pub dropped: Vec<(String, f64)>,
}

/// Remove feature columns whose missing fraction strictly exceeds
/// `threshold`. The label column and ignored columns are never considered.
pub fn drop_high_missing(table: &DataTable, threshold: f64) -> Result<(DataTable, PruneAudit)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Table(format!(
            "missing threshold must be in (0, 1], got {threshold}"
        )));
    }
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for (i, cs) in table.schema().iter().enumerate() {
        let frac = table.missing_fraction(i);
        if cs.role == ColumnRole::Feature && frac > threshold {
            dropped.push((cs.name.clone(), frac));
        } else {
            keep.push(i);
        }
    }
    Ok((
        table.select_columns(&keep),
        PruneAudit { threshold, dropped },
    ))
}

/// One binary classification scenario: which class symbols count as
/// positive and which as negative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryScenario {
    pub name: String,
    pub positive: BTreeSet<String>,
    pub negative: BTreeSet<String>,
}

impl BinaryScenario {
    pub fn new<S: Into<String>>(
        name: S,
        positive: impl IntoIterator<Item = S>,
        negative: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let sc = BinaryScenario {
            name: name.into(),
            positive: positive.into_iter().map(Into::into).collect(),
            negative: negative.into_iter().map(Into::into).collect(),
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.positive.is_empty() || self.negative.is_empty() {
            return Err(Error::Schema(format!(
                "scenario '{}': positive and negative class sets must be non-empty",
                self.name
            )));
        }
        if let Some(shared) = self.positive.intersection(&self.negative).next() {
            return Err(Error::Schema(format!(
                "scenario '{}': class '{}' appears in both sets",
                self.name, shared
            )));
        }
        Ok(())
    }
}

/// Keep only rows whose class belongs to the scenario, emit 0/1 labels
/// (1 = positive set), and strip the multiclass label column from the
/// returned feature table.
pub fn binarize(table: &DataTable, scenario: &BinaryScenario) -> Result<(DataTable, Vec<u8>)> {
    scenario.validate()?;
    let observed: BTreeSet<&str> = table.class_of_rows()?.into_iter().collect();
    for class in scenario.positive.iter().chain(&scenario.negative) {
        if !observed.contains(class.as_str()) {
            return Err(Error::Table(format!(
                "scenario '{}' names class '{}' absent from the table",
                scenario.name, class
            )));
        }
    }

    let classes = table.class_of_rows()?;
    let mut keep = Vec::new();
    let mut labels = Vec::new();
    for (r, class) in classes.iter().enumerate() {
        if scenario.positive.contains(*class) {
            keep.push(r);
            labels.push(1u8);
        } else if scenario.negative.contains(*class) {
            keep.push(r);
            labels.push(0u8);
        }
    }
    if !labels.contains(&1) || !labels.contains(&0) {
        return Err(Error::Table(format!(
            "scenario '{}': empty positive or negative subset after filtering",
            scenario.name
        )));
    }

    let label_col = table.label_column()?;
    let feature_cols: Vec<usize> = (0..table.n_cols()).filter(|&c| c != label_col).collect();
    let out = table.select_rows(&keep).select_columns(&feature_cols);
    Ok((out, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmp_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn basic_schema() -> Vec<ColumnSchema> {
        vec![
            ColumnSchema::numeric("age"),
            ColumnSchema::categorical("sex"),
            ColumnSchema::label("class"),
        ]
    }

    #[test]
    fn load_parses_missing_cells() {
        let f = tmp_csv("age,sex,class\n1,a,X\n,b,Y\n3,NA,X\n");
        let t = load_csv(f.path(), &basic_schema(), &MissingTokens::default()).unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.column(0).n_missing(), 1);
        assert_eq!(t.column(1).n_missing(), 1);
        assert_eq!(t.column(2).n_missing(), 0);
    }

    #[test]
    fn load_rejects_bad_numeric() {
        let f = tmp_csv("age,sex,class\nabc,a,X\n");
        let err = load_csv(f.path(), &basic_schema(), &MissingTokens::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1"), "{msg}");
        assert!(msg.contains("age"), "{msg}");
    }

    #[test]
    fn load_rejects_header_mismatch() {
        let f = tmp_csv("age,gender,class\n1,a,X\n");
        assert!(load_csv(f.path(), &basic_schema(), &MissingTokens::default()).is_err());
    }

    #[test]
    fn load_rejects_row_length_mismatch() {
        let f = tmp_csv("age,sex,class\n1,a\n");
        let err = load_csv(f.path(), &basic_schema(), &MissingTokens::default()).unwrap_err();
        assert!(err.to_string().contains("row 1"));
    }

    #[test]
    fn label_column_must_be_complete() {
        let f = tmp_csv("age,sex,class\n1,a,\n");
        assert!(load_csv(f.path(), &basic_schema(), &MissingTokens::default()).is_err());
    }

    #[test]
    fn class_counts_match_file() {
        let mut content = String::from("age,sex,class\n");
        for _ in 0..591 {
            content.push_str("1,a,Bladder\n");
        }
        for _ in 0..201 {
            content.push_str("2,b,Prostate\n");
        }
        let f = tmp_csv(&content);
        let t = load_csv(f.path(), &basic_schema(), &MissingTokens::default()).unwrap();
        let counts = t.class_counts().unwrap();
        assert_eq!(counts["Bladder"], 591);
        assert_eq!(counts["Prostate"], 201);
    }

    fn table_with_missing(frac_missing: &[(&str, usize, usize)]) -> DataTable {
        // (name, missing, total) per numeric feature column
        let n = frac_missing[0].2;
        let mut schema = Vec::new();
        let mut cols = Vec::new();
        for (name, miss, total) in frac_missing {
            assert_eq!(*total, n);
            schema.push(ColumnSchema::numeric(name));
            let col: Vec<Option<f64>> = (0..n)
                .map(|i| if i < *miss { None } else { Some(i as f64) })
                .collect();
            cols.push(ColumnData::Numeric(col));
        }
        schema.push(ColumnSchema::label("class"));
        cols.push(ColumnData::Categorical(
            (0..n).map(|i| Some(if i % 2 == 0 { "A" } else { "B" }.into())).collect(),
        ));
        DataTable::new(schema, cols).unwrap()
    }

    #[test]
    fn prune_drops_strictly_above_threshold() {
        // 464/1000 = 46.4% missing is dropped at 0.45; 442/1000 = 44.2% stays.
        let t = table_with_missing(&[("calcium", 464, 1000), ("albumin", 442, 1000)]);
        let (pruned, audit) = drop_high_missing(&t, 0.45).unwrap();
        assert_eq!(audit.dropped.len(), 1);
        assert_eq!(audit.dropped[0].0, "calcium");
        assert!(pruned.column_index("albumin").is_some());
        assert!(pruned.column_index("calcium").is_none());
        assert!(pruned.column_index("class").is_some());
    }

    #[test]
    fn prune_is_identity_on_complete_table() {
        let t = table_with_missing(&[("a", 0, 10), ("b", 0, 10)]);
        let (pruned, audit) = drop_high_missing(&t, 0.45).unwrap();
        assert!(audit.dropped.is_empty());
        assert_eq!(pruned, t);
    }

    #[test]
    fn prune_is_idempotent() {
        let t = table_with_missing(&[("a", 6, 10), ("b", 2, 10)]);
        let (once, _) = drop_high_missing(&t, 0.45).unwrap();
        let (twice, audit) = drop_high_missing(&once, 0.45).unwrap();
        assert!(audit.dropped.is_empty());
        assert_eq!(once, twice);
    }

    #[test]
    fn prune_never_drops_label() {
        let n = 10;
        let schema = vec![ColumnSchema::numeric("x"), ColumnSchema::label("class")];
        let cols = vec![
            ColumnData::Numeric((0..n).map(|_| None).collect()),
            ColumnData::Categorical((0..n).map(|i| Some(format!("c{}", i % 2))).collect()),
        ];
        let t = DataTable::new(schema, cols).unwrap();
        let (pruned, audit) = drop_high_missing(&t, 0.45).unwrap();
        assert_eq!(audit.dropped.len(), 1);
        assert_eq!(pruned.n_cols(), 1);
        assert!(pruned.label_column().is_ok());
    }

    fn five_class_table() -> DataTable {
        let spec = [
            ("Bladder", 591),
            ("Prostate", 201),
            ("Kidney", 200),
            ("Uterus", 200),
            ("Cystitis", 144),
        ];
        let mut labels = Vec::new();
        for (name, count) in spec {
            for _ in 0..count {
                labels.push(Some(name.to_string()));
            }
        }
        let n = labels.len();
        let schema = vec![ColumnSchema::numeric("x"), ColumnSchema::label("class")];
        let cols = vec![
            ColumnData::Numeric((0..n).map(|i| Some(i as f64)).collect()),
            ColumnData::Categorical(labels),
        ];
        DataTable::new(schema, cols).unwrap()
    }

    #[test]
    fn binarize_pair_scenario() {
        let t = five_class_table();
        let sc = BinaryScenario::new("bc_vs_pc", ["Bladder"], ["Prostate"]).unwrap();
        let (out, y) = binarize(&t, &sc).unwrap();
        assert_eq!(y.iter().filter(|&&v| v == 1).count(), 591);
        assert_eq!(y.iter().filter(|&&v| v == 0).count(), 201);
        assert!(out.column_index("class").is_none());
        assert_eq!(out.n_rows(), 792);
    }

    #[test]
    fn binarize_one_vs_rest() {
        let t = five_class_table();
        let sc = BinaryScenario::new(
            "bc_vs_others",
            vec!["Bladder"],
            vec!["Prostate", "Kidney", "Uterus", "Cystitis"],
        )
        .unwrap();
        let (_, y) = binarize(&t, &sc).unwrap();
        assert_eq!(y.iter().filter(|&&v| v == 1).count(), 591);
        assert_eq!(y.iter().filter(|&&v| v == 0).count(), 745);
    }

    #[test]
    fn binarize_rejects_absent_class() {
        let t = five_class_table();
        let sc = BinaryScenario::new("bad", ["Bladder"], ["Lung"]).unwrap();
        assert!(binarize(&t, &sc).is_err());
    }

    #[test]
    fn scenario_rejects_overlap() {
        assert!(BinaryScenario::new("bad", ["A"], ["A", "B"]).is_err());
    }

    #[test]
    fn schema_file_round_trip() {
        let sf = SchemaFile {
            missing_tokens: Some(vec!["".into(), "NA".into()]),
            columns: basic_schema(),
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("schema.toml");
        save_schema(&sf, &p).unwrap();
        let loaded = load_schema(&p).unwrap();
        assert_eq!(loaded.columns, sf.columns);
        assert_eq!(loaded.missing(), MissingTokens(vec!["".into(), "NA".into()]));
    }
}
