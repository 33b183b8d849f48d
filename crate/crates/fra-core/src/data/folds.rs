//! Stratified fold assignment for cross-validation.

use crate::error::{Error, Result};
use crate::seed::derive_seed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A disjoint assignment of every sample to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    fold_of: Vec<u32>,
    warnings: Vec<String>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self) -> &[u32] {
        &self.fold_of
    }

    pub fn len(&self) -> usize {
        self.fold_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fold_of.is_empty()
    }

    /// Indices held out by fold `f`.
    pub fn fold_indices(&self, f: usize) -> Vec<usize> {
        self.fold_of
            .iter()
            .enumerate()
            .filter(|(_, &x)| x as usize == f)
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices trained on when fold `f` is held out.
    pub fn train_indices(&self, f: usize) -> Vec<usize> {
        self.fold_of
            .iter()
            .enumerate()
            .filter(|(_, &x)| x as usize != f)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// Assigns samples to `k` folds, stratified by class.
///
/// Within every class the indices are shuffled by a seeded generator and
/// dealt round-robin over the folds, so per-class counts across folds
/// differ by at most one. Deterministic given `(labels, k, seed)`.
pub fn stratified_folds(labels: &[usize], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::domain(format!("fold count must be >= 2, got {k}")));
    }
    if labels.is_empty() {
        return Err(Error::domain("cannot fold an empty label set"));
    }
    let classes = labels.iter().copied().max().unwrap() + 1;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class[c].push(i);
    }
    let mut warnings = Vec::new();
    let smallest = by_class
        .iter()
        .filter(|v| !v.is_empty())
        .map(Vec::len)
        .min()
        .unwrap_or(0);
    if k > smallest {
        warnings.push(format!(
            "k = {k} exceeds the smallest class count {smallest}; some folds will miss a class"
        ));
    }
    let mut fold_of = vec![0u32; labels.len()];
    for (class, mut indices) in by_class.into_iter().enumerate() {
        if indices.is_empty() {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[class as u64]));
        indices.shuffle(&mut rng);
        for (i, idx) in indices.into_iter().enumerate() {
            fold_of[idx] = (i % k) as u32;
        }
    }
    Ok(FoldAssignment {
        k,
        fold_of,
        warnings,
    })
}
