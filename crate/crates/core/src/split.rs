//! Stratified train/test partitioning.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed::rng_from;

/// Split indices into train/test preserving class proportions.
///
/// Per-class test count is `floor(count * fraction + 0.5)`; the partition is
/// exact and deterministic for a fixed seed. Errors if either class would be
/// absent from one side.
pub fn stratified_split(
    labels: &[u8],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = rng_from(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [0u8, 1u8] {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if members.len() < 2 {
            return Err(Error::Split(format!(
                "class {class} has {} members; need at least 2 to appear in both partitions",
                members.len()
            )));
        }
        let n_test = (members.len() as f64 * test_fraction + 0.5).floor() as usize;
        if n_test == 0 || n_test == members.len() {
            return Err(Error::Split(format!(
                "class {class} too small to appear in both partitions \
                 ({} members at fraction {test_fraction})",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let (te, tr) = members.split_at(n_test);
        test.extend_from_slice(te);
        train.extend_from_slice(tr);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Stratified k-fold assignment: each index appears in exactly one
/// validation fold, per-class fold sizes differ by at most one, and the
/// first `count % k` folds of a class take the extra member.
///
/// Returns `(train_indices, validation_indices)` per fold, each ascending.
pub fn stratified_kfold(
    labels: &[u8],
    k: usize,
    seed: u64,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::Split(format!("need at least 2 folds, got {k}")));
    }
    let mut rng = rng_from(seed);
    let mut fold_members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for class in [0u8, 1u8] {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if members.len() < k {
            return Err(Error::Split(format!(
                "class {class} has {} members, fewer than {k} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let base = members.len() / k;
        let extra = members.len() % k;
        let mut offset = 0;
        for (f, fold) in fold_members.iter_mut().enumerate() {
            let size = base + usize::from(f < extra);
            fold.extend_from_slice(&members[offset..offset + size]);
            offset += size;
        }
    }
    Ok(fold_members
        .into_iter()
        .map(|mut valid| {
            valid.sort_unstable();
            let in_valid: std::collections::BTreeSet<usize> = valid.iter().copied().collect();
            let train: Vec<usize> = (0..labels.len()).filter(|i| !in_valid.contains(i)).collect();
            (train, valid)
        })
        .collect())
}
