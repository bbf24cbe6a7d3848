//! Filling missing cells: K-nearest-neighbors averaging for numeric
//! columns, training-set mode for categoricals.
//!
//! ```bash
//! cargo run --example impute_missing
//! ```

use shapsel::impute::{knn_fit, knn_transform, mode_fit, mode_transform};
use shapsel::table::{ColumnData, ColumnSchema, DataTable};

fn main() -> shapsel::Result<()> {
    let schema = vec![
        ColumnSchema::numeric("weight"),
        ColumnSchema::numeric("glucose"),
        ColumnSchema::categorical("smoker"),
    ];
    let columns = vec![
        ColumnData::Numeric(vec![
            Some(71.0),
            Some(83.0),
            Some(69.0),
            None,
            Some(90.0),
            Some(75.0),
        ]),
        ColumnData::Numeric(vec![
            Some(5.1),
            Some(6.0),
            None,
            Some(5.4),
            Some(6.4),
            None,
        ]),
        ColumnData::Categorical(vec![
            Some("no".into()),
            Some("yes".into()),
            Some("no".into()),
            None,
            Some("yes".into()),
            Some("no".into()),
        ]),
    ];
    let table = DataTable::new(schema, columns)?;
    let train_rows: Vec<usize> = (0..table.n_rows()).collect();

    // Numeric: neighbors found by masked Euclidean distance over
    // standardized columns; each missing cell takes the mean of the k
    // nearest rows that observe its column.
    let knn = knn_fit(&table, &train_rows, 2)?;
    let numeric = knn_transform(&knn, &table, &train_rows)?;
    for (name, values) in &numeric {
        println!("{name}: {values:?}");
    }

    // Categorical: the training-set mode, ties to the lexicographically
    // smallest symbol.
    let mode = mode_fit(&table, &train_rows)?;
    for (name, symbol, count) in mode.modes() {
        println!("mode of {name}: '{symbol}' (seen {count} times)");
    }
    let categorical = mode_transform(&mode, &table, &train_rows)?;
    for (name, values) in &categorical {
        println!("{name}: {values:?}");
    }
    Ok(())
}
