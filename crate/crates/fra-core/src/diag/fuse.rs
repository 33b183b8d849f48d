//! Linear fusion of two classifiers' predictions.

use crate::error::{Error, Result};

/// Convex combination `lambda * p1 + (1 - lambda) * p2` of two probability
/// vectors over the same classes.
pub fn fuse(p1: &[f64], p2: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain(format!(
            "fusion weight must lie in [0, 1], got {lambda}"
        )));
    }
    if p1.len() != p2.len() {
        return Err(Error::domain(format!(
            "prediction lengths differ: {} vs {}",
            p1.len(),
            p2.len()
        )));
    }
    Ok(p1
        .iter()
        .zip(p2)
        .map(|(&a, &b)| lambda * a + (1.0 - lambda) * b)
        .collect())
}

/// The tuned weight and the validation accuracy it achieves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaChoice {
    pub lambda: f64,
    pub accuracy: f64,
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Grid search over lambda in {0, 0.05, ..., 1.0} maximizing validation
/// accuracy of the fused argmax. Ties break toward the lambda nearest 0.5,
/// then toward the smaller lambda.
pub fn tune_lambda(
    probs1: &[Vec<f64>],
    probs2: &[Vec<f64>],
    truths: &[usize],
) -> Result<LambdaChoice> {
    if probs1.is_empty() || probs1.len() != probs2.len() || probs1.len() != truths.len() {
        return Err(Error::domain(
            "validation predictions and truths must be equal-length and non-empty",
        ));
    }
    let n = truths.len();
    let mut best: Option<(usize, f64)> = None; // (correct count, lambda)
    for step in 0..=20usize {
        let lambda = step as f64 * 0.05;
        let mut correct = 0usize;
        for ((p1, p2), &t) in probs1.iter().zip(probs2).zip(truths) {
            let fused = fuse(p1, p2, lambda)?;
            if argmax(&fused) == t {
                correct += 1;
            }
        }
        let better = match best {
            None => true,
            Some((bc, bl)) => {
                correct > bc
                    || (correct == bc
                        && ((lambda - 0.5).abs() < (bl - 0.5).abs() - 1e-12
                            || ((lambda - 0.5).abs() - (bl - 0.5).abs()).abs() <= 1e-12
                                && lambda < bl))
            }
        };
        if better {
            best = Some((correct, lambda));
        }
    }
    let (correct, lambda) = best.expect("grid is non-empty");
    Ok(LambdaChoice {
        lambda,
        accuracy: correct as f64 / n as f64,
    })
}
