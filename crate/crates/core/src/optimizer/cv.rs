//! Cross-validated choice of the loss parameter `k`.

use rand::seq::SliceRandom;

use super::trainer::{train_bound_minimizer, TrainConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::par;
use crate::rng;

pub const DEFAULT_K_GRID: [usize; 7] = [2, 3, 5, 8, 13, 21, 34];

#[derive(Debug, Clone, PartialEq)]
pub struct KSelection {
    pub k: usize,
    /// `(k, mean validation error)` for every grid value, in grid order.
    pub scores: Vec<(usize, f64)>,
}

/// Splits indices into `folds` groups, shuffling each class separately and
/// dealing its members round-robin so class proportions are preserved.
/// Returns the held-out indices of each fold, sorted.
pub fn stratified_folds(labels: &[i8], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {folds}")));
    }
    if labels.len() < folds {
        return Err(Error::invalid(format!(
            "cannot form {folds} folds from {} points",
            labels.len()
        )));
    }
    let mut out = vec![Vec::new(); folds];
    let mut next = 0usize;
    for (class, label) in [1i8, -1].into_iter().enumerate() {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        idx.shuffle(&mut rng::stream(seed, class as u64));
        for i in idx {
            out[next % folds].push(i);
            next += 1;
        }
    }
    out.iter_mut().for_each(|f| f.sort_unstable());
    Ok(out)
}

/// Picks `k` from `grid` by `folds`-fold stratified cross-validation of the
/// bound minimizer; ties go to the smallest `k`.
pub fn select_k(dataset: &Dataset, grid: &[usize], folds: usize, base: &TrainConfig) -> Result<KSelection> {
    if grid.is_empty() {
        return Err(Error::invalid("k grid is empty"));
    }
    if let Some(&bad) = grid.iter().find(|&&k| k < 2) {
        return Err(Error::invalid(format!("k grid values must be ≥ 2, got {bad}")));
    }
    let split = stratified_folds(dataset.labels(), folds, rng::derive_seed(base.seed, 0xF01D))?;
    let train_sets: Vec<Vec<usize>> = split
        .iter()
        .map(|held| (0..dataset.n()).filter(|i| held.binary_search(i).is_err()).collect())
        .collect();
    let cells = grid.len() * folds;
    let errs = par::map(cells, |c| -> Result<f64> {
        let (gi, fi) = (c / folds, c % folds);
        let cfg = TrainConfig {
            k: grid[gi],
            ..*base
        };
        let model = train_bound_minimizer(&dataset.subset(&train_sets[fi]), &cfg)?;
        let held = dataset.subset(&split[fi]);
        Ok(model.error_rate(&held)? * held.n() as f64)
    });
    let errs: Vec<f64> = errs.into_iter().collect::<Result<_>>()?;
    let mut scores = Vec::with_capacity(grid.len());
    for (gi, &k) in grid.iter().enumerate() {
        let wrong: f64 = errs[gi * folds..(gi + 1) * folds].iter().sum();
        scores.push((k, wrong / dataset.n() as f64));
    }
    let mut best = scores[0];
    for &(k, s) in &scores[1..] {
        if s < best.1 || (s == best.1 && k < best.0) {
            best = (k, s);
        }
    }
    Ok(KSelection { k: best.0, scores })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition_and_stratify() {
        let labels: Vec<i8> = (0..23).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        let folds = stratified_folds(&labels, 5, 9).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        for f in &folds {
            let pos = f.iter().filter(|&&i| labels[i] == 1).count();
            assert!((1..=2).contains(&pos));
        }
        assert_eq!(folds, stratified_folds(&labels, 5, 9).unwrap());
    }
}
