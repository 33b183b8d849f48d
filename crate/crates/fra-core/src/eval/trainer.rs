//! Mini-batch Adam training with seeded shuffling and early stopping.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::metrics::{confusion, ConfusionMatrix};
use crate::data::{LabelScheme, LabeledDataset};
use crate::error::{Error, Result};
use crate::nn::{
    adam_step, backward, cross_entropy, forward_batch, init, AdamHyper, AdamState, ForwardMode,
    Mat, ModelParams, ModelSpec, Scalar, DEFAULT_INPUT_SCALE,
};
use crate::seed::derive_seed;

/// An epoch must improve the best loss by at least this much to reset the
/// early-stop counter.
pub const MIN_LOSS_IMPROVEMENT: f64 = 1e-5;

/// Independent seeds for the stochastic parts of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainSeeds {
    pub init: u64,
    pub shuffle: u64,
    pub dropout: u64,
    /// Used by cross-validation for the fold assignment.
    pub fold: u64,
}

impl TrainSeeds {
    /// Derives the four streams from one base seed.
    pub fn from_base(base: u64) -> Self {
        TrainSeeds {
            init: derive_seed(base, &[0x11]),
            shuffle: derive_seed(base, &[0x12]),
            dropout: derive_seed(base, &[0x13]),
            fold: derive_seed(base, &[0x14]),
        }
    }

    /// Per-fold reseeding so parallel folds stay independent.
    pub fn for_fold(&self, fold: usize) -> Self {
        TrainSeeds {
            init: derive_seed(self.init, &[fold as u64]),
            shuffle: derive_seed(self.shuffle, &[fold as u64]),
            dropout: derive_seed(self.dropout, &[fold as u64]),
            fold: self.fold,
        }
    }
}

/// Training-loop configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a loss improvement before stopping.
    pub patience: usize,
    pub seeds: TrainSeeds,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-4,
            batch_size: 32,
            max_epochs: 200,
            patience: 20,
            seeds: TrainSeeds::from_base(0),
        }
    }
}

impl TrainConfig {
    pub fn with_seeds(mut self, base: u64) -> Self {
        self.seeds = TrainSeeds::from_base(base);
        self
    }

    fn validate(&self, dataset_len: usize) -> Result<()> {
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::domain("learning rate must be positive"));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 {
            return Err(Error::domain(
                "batch size, epochs, and patience must be positive",
            ));
        }
        if self.batch_size > dataset_len {
            return Err(Error::domain(format!(
                "batch size {} exceeds dataset size {dataset_len}",
                self.batch_size
            )));
        }
        Ok(())
    }
}

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams<f32>,
    /// Mean loss per epoch.
    pub history: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Converts sweeps to the model's input matrix (dB / input scale).
pub fn dataset_matrix(ds: &LabeledDataset) -> Mat<f32> {
    let cols = ds.grid().len();
    let mut m = Mat::zeros(ds.len(), cols);
    for (i, s) in ds.samples().iter().enumerate() {
        for (dst, &v) in m.row_mut(i).iter_mut().zip(s.sweep.values()) {
            *dst = v / DEFAULT_INPUT_SCALE;
        }
    }
    m
}

/// Encodes every sample's label under the scheme.
pub fn encode_labels(ds: &LabeledDataset, scheme: &LabelScheme) -> Result<Vec<usize>> {
    ds.samples()
        .iter()
        .map(|s| scheme.encode(&s.label))
        .collect()
}

fn gather_rows(x: &Mat<f32>, indices: &[usize]) -> Mat<f32> {
    let mut out = Mat::zeros(indices.len(), x.cols());
    for (r, &i) in indices.iter().enumerate() {
        out.row_mut(r).copy_from_slice(x.row(i));
    }
    out
}

fn one_hot_rows(labels: &[usize], indices: &[usize], classes: usize) -> Mat<f32> {
    let mut out = Mat::zeros(indices.len(), classes);
    for (r, &i) in indices.iter().enumerate() {
        out.row_mut(r)[labels[i]] = 1.0;
    }
    out
}

/// Core loop over explicit sample indices; [`train`] and cross-validation
/// both drive this.
pub(crate) fn train_on_indices(
    spec: &ModelSpec,
    x: &Mat<f32>,
    labels: &[usize],
    indices: &[usize],
    cfg: &TrainConfig,
) -> Result<(ModelParams<f32>, Vec<f64>)> {
    cfg.validate(indices.len())?;
    let classes = spec.output_width();
    let mut params: ModelParams<f32> = init(spec, cfg.seeds.init);
    let mut state = AdamState::new(spec, AdamHyper::with_learning_rate(cfg.learning_rate));
    let mut order: Vec<usize> = indices.to_vec();
    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut strikes = 0usize;
    for epoch in 0..cfg.max_epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seeds.shuffle, &[epoch as u64]));
        order.shuffle(&mut rng);
        let mut loss_acc = 0.0f64;
        for (bi, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let xb = gather_rows(x, chunk);
            let yb = one_hot_rows(labels, chunk, classes);
            let mut dropout_rng = ChaCha8Rng::seed_from_u64(derive_seed(
                cfg.seeds.dropout,
                &[epoch as u64, bi as u64],
            ));
            let pass = forward_batch(
                &params,
                spec,
                &xb,
                ForwardMode::Train {
                    dropout_rng: &mut dropout_rng,
                },
            )?;
            let loss = cross_entropy(&pass.probs, &yb)?.into_f64();
            if !loss.is_finite() {
                return Err(Error::numerical(
                    format!("epoch {epoch}"),
                    "training loss diverged",
                ));
            }
            let grads = backward(&params, spec, &pass, &yb)?;
            adam_step(&mut params, &grads, &mut state)?;
            loss_acc += loss * chunk.len() as f64;
        }
        let epoch_loss = loss_acc / order.len() as f64;
        history.push(epoch_loss);
        if epoch_loss < best - MIN_LOSS_IMPROVEMENT {
            best = epoch_loss;
            strikes = 0;
        } else {
            strikes += 1;
            if strikes >= cfg.patience {
                break;
            }
        }
    }
    Ok((params, history))
}

/// Trains a fresh model on the whole dataset under the scheme.
pub fn train(
    spec: &ModelSpec,
    ds: &LabeledDataset,
    scheme: &LabelScheme,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    if ds.is_empty() {
        return Err(Error::domain("cannot train on an empty dataset"));
    }
    if spec.output_width() != scheme.class_count() {
        return Err(Error::domain(format!(
            "model output width {} does not match the scheme's {} classes",
            spec.output_width(),
            scheme.class_count()
        )));
    }
    let labels = encode_labels(ds, scheme)?;
    let mut warnings = Vec::new();
    for c in 0..scheme.class_count() {
        if !labels.contains(&c) {
            warnings.push(format!("class {c} has no samples in the training set"));
        }
    }
    let x = dataset_matrix(ds);
    let indices: Vec<usize> = (0..ds.len()).collect();
    let (params, history) = train_on_indices(spec, &x, &labels, &indices, cfg)?;
    Ok(TrainOutcome {
        params,
        history,
        warnings,
    })
}

/// Argmax with ties broken toward the lower class index.
pub fn argmax(scores: &[f32]) -> usize {
    let mut best = 0usize;
    for (i, &v) in scores.iter().enumerate().skip(1) {
        if v > scores[best] {
            best = i;
        }
    }
    best
}

/// Eval-mode class predictions for a matrix of inputs.
pub fn predict_classes(
    params: &ModelParams<f32>,
    spec: &ModelSpec,
    x: &Mat<f32>,
) -> Result<Vec<usize>> {
    let pass = forward_batch(params, spec, x, ForwardMode::Eval)?;
    Ok((0..pass.probs.rows())
        .map(|r| argmax(pass.probs.row(r)))
        .collect())
}

/// Runs a trained model over a labeled dataset and tallies the confusion
/// matrix under the scheme.
pub fn evaluate(
    params: &ModelParams<f32>,
    spec: &ModelSpec,
    ds: &LabeledDataset,
    scheme: &LabelScheme,
) -> Result<ConfusionMatrix> {
    let labels = encode_labels(ds, scheme)?;
    let x = dataset_matrix(ds);
    let preds = predict_classes(params, spec, &x)?;
    confusion(&preds, &labels, scheme.class_count())
}
