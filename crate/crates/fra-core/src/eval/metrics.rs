//! Confusion matrices, accuracy, and macro-averaged F1.

use crate::error::{Error, Result};

/// C x C counts; rows are true classes, columns predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        ConfusionMatrix {
            classes,
            counts: vec![0; classes * classes],
        }
    }

    pub fn from_counts(classes: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != classes * classes {
            return Err(Error::domain("confusion matrix shape mismatch"));
        }
        Ok(ConfusionMatrix { classes, counts })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn count(&self, truth: usize, pred: usize) -> u64 {
        self.counts[truth * self.classes + pred]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes).map(|i| self.count(i, i)).sum()
    }

    pub fn row_sum(&self, truth: usize) -> u64 {
        (0..self.classes).map(|p| self.count(truth, p)).sum()
    }

    pub fn col_sum(&self, pred: usize) -> u64 {
        (0..self.classes).map(|t| self.count(t, pred)).sum()
    }

    /// Fraction of correctly classified samples.
    pub fn accuracy(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(Error::domain("accuracy of an empty confusion matrix"));
        }
        Ok(self.trace() as f64 / total as f64)
    }

    /// Mean one-vs-rest F1 over all classes. A class with no predictions
    /// and no truths scores 0, keeping the denominator at the class count.
    pub fn macro_f1(&self) -> Result<f64> {
        if self.total() == 0 {
            return Err(Error::domain("macro F1 of an empty confusion matrix"));
        }
        let mut sum = 0.0;
        for c in 0..self.classes {
            let tp = self.count(c, c) as f64;
            let fp = self.col_sum(c) as f64 - tp;
            let fn_ = self.row_sum(c) as f64 - tp;
            let f1 = if tp == 0.0 {
                0.0
            } else {
                let precision = tp / (tp + fp);
                let recall = tp / (tp + fn_);
                2.0 * precision * recall / (precision + recall)
            };
            sum += f1;
        }
        Ok(sum / self.classes as f64)
    }

    /// CSV form: header row of predicted-class indices, one row per true class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("truth\\pred");
        for p in 0..self.classes {
            out.push_str(&format!(",{p}"));
        }
        out.push('\n');
        for t in 0..self.classes {
            out.push_str(&t.to_string());
            for p in 0..self.classes {
                out.push_str(&format!(",{}", self.count(t, p)));
            }
            out.push('\n');
        }
        out
    }
}

/// Tallies (truth, prediction) pairs into a confusion matrix.
pub fn confusion(preds: &[usize], truths: &[usize], classes: usize) -> Result<ConfusionMatrix> {
    if preds.len() != truths.len() {
        return Err(Error::domain(format!(
            "{} predictions vs {} truths",
            preds.len(),
            truths.len()
        )));
    }
    let mut cm = ConfusionMatrix::new(classes);
    for (&p, &t) in preds.iter().zip(truths) {
        if p >= classes || t >= classes {
            return Err(Error::domain(format!(
                "class out of range: pred {p}, truth {t}, classes {classes}"
            )));
        }
        cm.counts[t * classes + p] += 1;
    }
    Ok(cm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_predictions() {
        let cm = confusion(&[0, 1, 2], &[0, 1, 2], 3).unwrap();
        assert_eq!(cm.trace(), 3);
        assert_eq!(cm.accuracy().unwrap(), 1.0);
        assert_eq!(cm.macro_f1().unwrap(), 1.0);
    }

    #[test]
    fn hand_counted_two_class_case() {
        // truths [0,0,1,1], preds [0,1,1,1] -> [[1,1],[0,2]].
        let cm = confusion(&[0, 1, 1, 1], &[0, 0, 1, 1], 2).unwrap();
        assert_eq!(cm.count(0, 0), 1);
        assert_eq!(cm.count(0, 1), 1);
        assert_eq!(cm.count(1, 0), 0);
        assert_eq!(cm.count(1, 1), 2);
        assert_relative_eq!(cm.accuracy().unwrap(), 0.75);
    }

    #[test]
    fn binary_accuracy_from_tp_tn_fp_fn() {
        // TP=90, TN=5, FP=3, FN=2 with class 1 as positive -> 0.95.
        let cm = ConfusionMatrix::from_counts(2, vec![5, 3, 2, 90]).unwrap();
        assert_relative_eq!(cm.accuracy().unwrap(), 0.95);
    }

    #[test]
    fn macro_f1_hand_example() {
        // [[2,0],[1,1]]: class0 F1 = 0.8, class1 F1 = 2/3, macro = 0.7333...
        let cm = ConfusionMatrix::from_counts(2, vec![2, 0, 1, 1]).unwrap();
        let f1 = cm.macro_f1().unwrap();
        assert_relative_eq!(f1, (0.8 + 2.0 / 3.0) / 2.0, epsilon = 1e-12);
        assert!((f1 - 0.73333).abs() < 1e-5);
    }

    #[test]
    fn class_permutation_preserves_macro_f1() {
        let cm = ConfusionMatrix::from_counts(3, vec![5, 1, 0, 2, 7, 1, 0, 3, 9]).unwrap();
        // Swap classes 0 and 2 everywhere.
        let perm = [2usize, 1, 0];
        let mut swapped = ConfusionMatrix::new(3);
        for t in 0..3 {
            for p in 0..3 {
                swapped.counts[perm[t] * 3 + perm[p]] = cm.count(t, p);
            }
        }
        assert_relative_eq!(
            cm.macro_f1().unwrap(),
            swapped.macro_f1().unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn row_sums_equal_truth_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let truths: Vec<usize> = (0..500).map(|_| rng.random_range(0..6)).collect();
        let preds: Vec<usize> = (0..500).map(|_| rng.random_range(0..6)).collect();
        let cm = confusion(&preds, &truths, 6).unwrap();
        for c in 0..6 {
            let expect = truths.iter().filter(|&&t| t == c).count() as u64;
            assert_eq!(cm.row_sum(c), expect);
        }
        assert_eq!(cm.total(), 500);
    }

    /// Independent recomputation from raw pairs, structured differently
    /// from the implementation.
    fn brute_force_metrics(preds: &[usize], truths: &[usize], classes: usize) -> (f64, f64) {
        let n = preds.len() as f64;
        let correct = preds.iter().zip(truths).filter(|(p, t)| p == t).count() as f64;
        let mut f1_sum = 0.0;
        for c in 0..classes {
            let tp = preds
                .iter()
                .zip(truths)
                .filter(|(&p, &t)| p == c && t == c)
                .count() as f64;
            let fp = preds
                .iter()
                .zip(truths)
                .filter(|(&p, &t)| p == c && t != c)
                .count() as f64;
            let fn_ = preds
                .iter()
                .zip(truths)
                .filter(|(&p, &t)| p != c && t == c)
                .count() as f64;
            if tp + fp > 0.0 && tp + fn_ > 0.0 && tp > 0.0 {
                let prec = tp / (tp + fp);
                let rec = tp / (tp + fn_);
                f1_sum += 2.0 * (prec * rec) / (prec + rec);
            }
        }
        (correct / n, f1_sum / classes as f64)
    }

    #[test]
    fn metrics_match_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..1000 {
            let classes = rng.random_range(2..7);
            let n = rng.random_range(1..60);
            let truths: Vec<usize> = (0..n).map(|_| rng.random_range(0..classes)).collect();
            let preds: Vec<usize> = (0..n).map(|_| rng.random_range(0..classes)).collect();
            let cm = confusion(&preds, &truths, classes).unwrap();
            let (acc, f1) = brute_force_metrics(&preds, &truths, classes);
            assert_eq!(cm.accuracy().unwrap(), acc, "trial {trial}");
            assert_relative_eq!(cm.macro_f1().unwrap(), f1, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_class_zero_predictor_scores_the_base_rate() {
        // Always predicting Normal on a Group1-shaped label set scores the
        // Normal base rate, 25/1425.
        let mut truths = Vec::new();
        for (class, count) in [(0usize, 25), (1, 200), (2, 600), (3, 600)] {
            truths.extend(std::iter::repeat(class).take(count));
        }
        let preds = vec![0usize; truths.len()];
        let cm = confusion(&preds, &truths, 4).unwrap();
        assert_relative_eq!(cm.accuracy().unwrap(), 25.0 / 1425.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_matrix_is_a_domain_error() {
        let cm = ConfusionMatrix::new(3);
        assert!(cm.accuracy().is_err());
        assert!(cm.macro_f1().is_err());
        assert!(confusion(&[0], &[0, 1], 2).is_err());
        assert!(confusion(&[5], &[0], 2).is_err());
    }

    #[test]
    fn csv_shape() {
        let cm = confusion(&[0, 1], &[1, 1], 2).unwrap();
        let csv = cm.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "truth\\pred,0,1");
        assert_eq!(lines[2], "1,1,1");
    }
}
