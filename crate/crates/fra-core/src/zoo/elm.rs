//! Extreme learning machine baseline: a fixed random rectifier layer with a
//! closed-form ridge-regression readout.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::{LabelScheme, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::nn::DEFAULT_INPUT_SCALE;

/// Hidden width used when the caller does not pick one.
pub const DEFAULT_HIDDEN: usize = 1000;
/// Ridge coefficient used when the caller does not pick one.
pub const DEFAULT_RIDGE: f64 = 1e-3;

/// Random projection + rectifier, with a ridge least-squares readout fit
/// against one-hot targets. The hidden weights are never updated after
/// construction.
#[derive(Debug, Clone)]
pub struct ElmModel {
    hidden_weights: Vec<f64>,
    hidden_bias: Vec<f64>,
    /// (hidden + 1) x classes, the +1 row being the readout intercept.
    readout: Vec<f64>,
    hidden: usize,
    classes: usize,
    input_width: usize,
    input_scale: f64,
}

impl ElmModel {
    pub fn hidden_width(&self) -> usize {
        self.hidden
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    fn hidden_features(&self, values: &[f32]) -> Vec<f64> {
        let mut h = vec![0.0f64; self.hidden + 1];
        for (j, hv) in h.iter_mut().take(self.hidden).enumerate() {
            let row = &self.hidden_weights[j * self.input_width..(j + 1) * self.input_width];
            let mut acc = self.hidden_bias[j];
            for (w, &x) in row.iter().zip(values) {
                acc += w * (x as f64 / self.input_scale);
            }
            *hv = acc.max(0.0);
        }
        h[self.hidden] = 1.0;
        h
    }

    /// Argmax-able class scores (not normalized probabilities).
    pub fn predict(&self, values: &[f32]) -> Result<Vec<f64>> {
        if values.len() != self.input_width {
            return Err(Error::domain(format!(
                "input width {} does not match the model's {}",
                values.len(),
                self.input_width
            )));
        }
        let h = self.hidden_features(values);
        let mut scores = vec![0.0f64; self.classes];
        for (j, &hv) in h.iter().enumerate() {
            if hv == 0.0 {
                continue;
            }
            let row = &self.readout[j * self.classes..(j + 1) * self.classes];
            for (s, &w) in scores.iter_mut().zip(row) {
                *s += hv * w;
            }
        }
        Ok(scores)
    }
}

/// Fits the readout in closed form: `B = (H^T H + ridge I)^-1 H^T Y` with
/// `H` the rectified random projection of the dataset (plus an intercept
/// column) and `Y` the one-hot targets. Deterministic given `seed`.
pub fn elm_fit(
    ds: &LabeledDataset,
    scheme: &LabelScheme,
    hidden: usize,
    ridge: f64,
    seed: u64,
) -> Result<ElmModel> {
    if hidden < 1 {
        return Err(Error::domain("hidden width must be >= 1"));
    }
    if !(ridge > 0.0) {
        return Err(Error::domain("ridge coefficient must be > 0"));
    }
    if ds.is_empty() {
        return Err(Error::domain("cannot fit on an empty dataset"));
    }
    let input_width = ds.grid().len();
    let classes = scheme.class_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w_dist = Normal::new(0.0, (2.0 / input_width as f64).sqrt()).expect("positive std");
    let b_dist = Normal::new(0.0, 0.5).expect("positive std");
    let mut hidden_weights = vec![0.0f64; hidden * input_width];
    for w in &mut hidden_weights {
        *w = w_dist.sample(&mut rng);
    }
    let mut hidden_bias = vec![0.0f64; hidden];
    for b in &mut hidden_bias {
        *b = b_dist.sample(&mut rng);
    }

    let model_stub = ElmModel {
        hidden_weights,
        hidden_bias,
        readout: Vec::new(),
        hidden,
        classes,
        input_width,
        input_scale: DEFAULT_INPUT_SCALE as f64,
    };

    // Normal equations, accumulated sample by sample: G = H^T H + ridge I,
    // R = H^T Y.
    let p = hidden + 1;
    let mut g = vec![0.0f64; p * p];
    let mut r = vec![0.0f64; p * classes];
    for sample in ds.samples() {
        let h = model_stub.hidden_features(sample.sweep.values());
        let class = scheme.encode(&sample.label)?;
        for (i, &hi) in h.iter().enumerate() {
            if hi == 0.0 {
                continue;
            }
            let grow = &mut g[i * p..(i + 1) * p];
            for (gv, &hj) in grow.iter_mut().zip(&h) {
                *gv += hi * hj;
            }
            r[i * classes + class] += hi;
        }
    }
    for i in 0..p {
        g[i * p + i] += ridge;
    }
    if !cholesky_solve(&mut g, p, &mut r, classes) {
        return Err(Error::numerical(
            "elm readout",
            "normal equations are not positive definite",
        ));
    }
    Ok(ElmModel {
        readout: r,
        ..model_stub
    })
}
