//! Oversampling the minority class with SMOTE: synthetic rows interpolate
//! between a minority row and one of its nearest minority neighbors.
//!
//! ```bash
//! cargo run --example balance_smote
//! ```

use shapsel::matrix::Matrix;
use shapsel::smote::{smote, SmoteConfig};

fn main() -> shapsel::Result<()> {
    // 8 majority rows around the origin, 3 minority rows along a line.
    let x = Matrix::from_rows(&[
        vec![0.1, -0.2],
        vec![-0.3, 0.1],
        vec![0.2, 0.3],
        vec![-0.1, -0.1],
        vec![0.4, 0.0],
        vec![0.0, 0.4],
        vec![-0.4, 0.2],
        vec![0.3, -0.3],
        vec![5.0, 5.0],
        vec![6.0, 6.0],
        vec![7.0, 7.0],
    ])?;
    let y = vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1];

    let cfg = SmoteConfig {
        k_neighbors: 2,
        target_ratio: 1.0,
        seed: 11,
    };
    let (x_bal, y_bal, audit) = smote(&x, &y, &cfg)?;
    println!(
        "minority {} -> {} rows ({} synthetic, k = {})",
        audit.n_minority,
        y_bal.iter().filter(|&&l| l == audit.minority_label).count(),
        audit.n_synthetic,
        audit.k_used,
    );
    for (s, origin) in audit.origins.iter().enumerate() {
        let row = x_bal.row(x.n_rows() + s);
        println!(
            "synthetic {s}: parent row {} + {:.3} * (row {} - row {}) = [{:.3}, {:.3}]",
            origin.parent, origin.lambda, origin.neighbor, origin.parent, row[0], row[1]
        );
    }
    Ok(())
}
