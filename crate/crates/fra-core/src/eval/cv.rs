//! k-fold cross-validation harness.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::metrics::{confusion, ConfusionMatrix};
use super::trainer::{
    dataset_matrix, encode_labels, predict_classes, train_on_indices, TrainConfig,
};
use crate::data::{stratified_folds, LabelScheme, LabeledDataset};
use crate::error::{Error, Result};
use crate::nn::ModelSpec;

/// Held-out metrics of one fold.
#[derive(Debug, Clone)]
pub struct FoldResult {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub confusion: ConfusionMatrix,
}

/// Aggregated cross-validation report. Dispersion is reported both as the
/// sample standard deviation across folds and as that value over sqrt(k).
#[derive(Debug, Clone)]
pub struct CvReport {
    pub k: usize,
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub stderr_accuracy: f64,
    pub mean_macro_f1: f64,
    pub std_macro_f1: f64,
    pub stderr_macro_f1: f64,
    /// Wall-clock of the fold loop; not part of the serialized report so
    /// that report files stay byte-reproducible.
    pub wall_clock: Duration,
    pub warnings: Vec<String>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Stratified k-fold cross-validation: trains `k` fresh models (fold seeds
/// derived per fold) and evaluates each on its held-out fold. Folds run in
/// parallel and are assembled in index order, so the report is
/// schedule-invariant.
pub fn cross_validate(
    build_spec: &(dyn Fn(usize) -> Result<ModelSpec> + Sync),
    ds: &LabeledDataset,
    scheme: &LabelScheme,
    k: usize,
    cfg: &TrainConfig,
) -> Result<CvReport> {
    if k < 2 {
        return Err(Error::domain(format!("fold count must be >= 2, got {k}")));
    }
    if ds.is_empty() {
        return Err(Error::domain("cannot cross-validate an empty dataset"));
    }
    let classes = scheme.class_count();
    let spec = build_spec(classes)?;
    if spec.output_width() != classes {
        return Err(Error::domain(
            "spec builder ignored the requested output width",
        ));
    }
    let labels = encode_labels(ds, scheme)?;
    let assignment = stratified_folds(&labels, k, cfg.seeds.fold)?;
    let x = dataset_matrix(ds);
    let start = Instant::now();
    let folds: Result<Vec<FoldResult>> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let train_idx = assignment.train_indices(fold);
            let held_out = assignment.fold_indices(fold);
            let mut fold_cfg = *cfg;
            fold_cfg.seeds = cfg.seeds.for_fold(fold);
            fold_cfg.batch_size = fold_cfg.batch_size.min(train_idx.len());
            let (params, _history) =
                train_on_indices(&spec, &x, &labels, &train_idx, &fold_cfg)?;
            let mut xh = crate::nn::Mat::zeros(held_out.len(), x.cols());
            for (r, &i) in held_out.iter().enumerate() {
                xh.row_mut(r).copy_from_slice(x.row(i));
            }
            let preds = predict_classes(&params, &spec, &xh)?;
            let truths: Vec<usize> = held_out.iter().map(|&i| labels[i]).collect();
            let cm = confusion(&preds, &truths, classes)?;
            Ok(FoldResult {
                accuracy: cm.accuracy()?,
                macro_f1: cm.macro_f1()?,
                confusion: cm,
            })
        })
        .collect();
    let folds = folds?;
    let wall_clock = start.elapsed();
    let accs: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
    let f1s: Vec<f64> = folds.iter().map(|f| f.macro_f1).collect();
    let (mean_accuracy, std_accuracy) = mean_std(&accs);
    let (mean_macro_f1, std_macro_f1) = mean_std(&f1s);
    let sqrt_k = (k as f64).sqrt();
    Ok(CvReport {
        k,
        folds,
        mean_accuracy,
        std_accuracy,
        stderr_accuracy: std_accuracy / sqrt_k,
        mean_macro_f1,
        std_macro_f1,
        stderr_macro_f1: std_macro_f1 / sqrt_k,
        wall_clock,
        warnings: assignment.warnings().to_vec(),
    })
}

impl CvReport {
    /// Key-value text form, one metric per line. Deliberately excludes
    /// wall-clock so identical runs serialize identically.
    pub fn to_report_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("k = {}\n", self.k));
        out.push_str(&format!("mean_accuracy = {:.6}\n", self.mean_accuracy));
        out.push_str(&format!("std_accuracy = {:.6}\n", self.std_accuracy));
        out.push_str(&format!("stderr_accuracy = {:.6}\n", self.stderr_accuracy));
        out.push_str(&format!("mean_macro_f1 = {:.6}\n", self.mean_macro_f1));
        out.push_str(&format!("std_macro_f1 = {:.6}\n", self.std_macro_f1));
        out.push_str(&format!("stderr_macro_f1 = {:.6}\n", self.stderr_macro_f1));
        for (i, f) in self.folds.iter().enumerate() {
            out.push_str(&format!("fold_{i}_accuracy = {:.6}\n", f.accuracy));
            out.push_str(&format!("fold_{i}_macro_f1 = {:.6}\n", f.macro_f1));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning = {w}\n"));
        }
        out
    }

    /// Writes `report.txt` plus one confusion CSV per fold into `dir`.
    pub fn write_to_dir(&self, dir: impl AsRef<std::path::Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.txt"), self.to_report_string())?;
        for (i, f) in self.folds.iter().enumerate() {
            std::fs::write(dir.join(format!("fold_{i}_confusion.csv")), f.confusion.to_csv())?;
        }
        Ok(())
    }
}
