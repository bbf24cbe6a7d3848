//! Loading a CSV with a typed schema, pruning high-missingness columns,
//! binarizing a multiclass label, and splitting 80/20 stratified.
//!
//! ```bash
//! cargo run --example data_prep
//! ```

use std::io::Write;

use shapsel::split::stratified_split;
use shapsel::table::{
    binarize, drop_high_missing, load_csv, BinaryScenario, ColumnSchema, MissingTokens,
};

fn main() -> shapsel::Result<()> {
    // A small inline dataset: two feature columns, one of them mostly
    // missing, and a three-class label.
    let csv = "\
age,calcium,site,class
61,,left,carcinoma
58,2.1,right,carcinoma
70,,left,benign
49,,right,carcinoma
66,2.4,left,benign
54,,right,cystitis
63,,left,carcinoma
59,2.2,right,benign
";
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("cohort.csv");
    std::fs::File::create(&path)
        .and_then(|mut f| f.write_all(csv.as_bytes()))
        .expect("write sample csv");

    let schema = vec![
        ColumnSchema::numeric("age"),
        ColumnSchema::numeric("calcium"),
        ColumnSchema::categorical("site"),
        ColumnSchema::label("class"),
    ];
    let table = load_csv(&path, &schema, &MissingTokens::default())?;
    println!("loaded {} rows x {} columns", table.n_rows(), table.n_cols());
    for (i, cs) in table.schema().iter().enumerate() {
        println!(
            "  {:<8} {:>5.1}% missing",
            cs.name,
            100.0 * table.missing_fraction(i)
        );
    }

    // calcium is 62.5% missing: above the 45% threshold, so it is dropped.
    let (pruned, audit) = drop_high_missing(&table, 0.45)?;
    for (name, frac) in &audit.dropped {
        println!("dropped '{}' at {:.1}% missing", name, frac * 100.0);
    }

    let scenario = BinaryScenario::new("carcinoma_vs_benign", ["carcinoma"], ["benign"])?;
    let (features, labels) = binarize(&pruned, &scenario)?;
    let positives = labels.iter().filter(|&&l| l == 1).count();
    println!(
        "scenario {}: {} positives / {} negatives, {} feature columns",
        scenario.name,
        positives,
        labels.len() - positives,
        features.n_cols()
    );

    let (train_idx, test_idx) = stratified_split(&labels, 0.25, 7)?;
    println!("train rows {:?}", train_idx);
    println!("test rows  {:?}", test_idx);
    Ok(())
}
