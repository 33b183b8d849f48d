//! Forward pass, softmax, cross-entropy, and exact backpropagation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::mat::{matmul_nn, matmul_nt, matmul_tn, Mat};
use super::model::{Gradients, ModelParams, ModelSpec};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Probabilities below this are clamped before taking logs.
pub const LOG_CLAMP: f64 = 1e-12;

/// Whether a pass applies dropout (train) or is mask-free (eval).
pub enum ForwardMode<'a> {
    Eval,
    Train { dropout_rng: &'a mut ChaCha8Rng },
}

/// Everything backward needs from the forward pass: per-layer inputs,
/// pre-activations, scaled dropout masks, and the output probabilities.
pub struct ForwardPass<T> {
    /// Input to each learnable layer (`inputs[0]` is the network input).
    pub inputs: Vec<Mat<T>>,
    /// Hidden-layer pre-activations, the rectifier gates for backprop.
    pub preacts: Vec<Mat<T>>,
    /// Scaled dropout masks per hidden layer (`None` where inactive).
    pub masks: Vec<Option<Mat<T>>>,
    pub probs: Mat<T>,
}

impl<T: Scalar> ForwardPass<T> {
    pub fn batch_size(&self) -> usize {
        self.probs.rows()
    }
}

/// Numerically safe softmax of one row: exponentials are shifted by the row
/// maximum, so the argmax and the shift-invariance of the result survive
/// arbitrarily large inputs.
pub fn softmax<T: Scalar>(v: &[T]) -> Result<Vec<T>> {
    if v.is_empty() {
        return Err(Error::domain("softmax of an empty vector"));
    }
    let max = v.iter().cloned().fold(T::neg_infinity(), T::max);
    let mut out: Vec<T> = v.iter().map(|&x| (x - max).exp()).collect();
    let sum: T = out.iter().copied().sum();
    for o in &mut out {
        *o /= sum;
    }
    Ok(out)
}

fn softmax_rows<T: Scalar>(m: &mut Mat<T>) {
    for r in 0..m.rows() {
        let row = m.row_mut(r);
        let max = row.iter().cloned().fold(T::neg_infinity(), T::max);
        let mut sum = T::zero();
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
}

/// Mean cross-entropy between predicted probabilities and one-hot targets,
/// with probabilities clamped at [`LOG_CLAMP`].
pub fn cross_entropy<T: Scalar>(probs: &Mat<T>, targets: &Mat<T>) -> Result<T> {
    if probs.rows() == 0 {
        return Err(Error::domain("cross-entropy of an empty batch"));
    }
    if probs.rows() != targets.rows() || probs.cols() != targets.cols() {
        return Err(Error::domain(format!(
            "probability batch {}x{} does not match target batch {}x{}",
            probs.rows(),
            probs.cols(),
            targets.rows(),
            targets.cols()
        )));
    }
    let clamp = T::from_f64(LOG_CLAMP);
    let mut total = T::zero();
    for r in 0..probs.rows() {
        for (&p, &y) in probs.row(r).iter().zip(targets.row(r)) {
            if y != T::zero() {
                total -= y * p.max(clamp).ln();
            }
        }
    }
    Ok(total / T::from_f64(probs.rows() as f64))
}

fn add_bias_rows<T: Scalar>(m: &mut Mat<T>, bias: &[T]) {
    for r in 0..m.rows() {
        for (v, b) in m.row_mut(r).iter_mut().zip(bias) {
            *v += *b;
        }
    }
}

/// Runs a batch through the network.
///
/// Hidden layers apply `max(0, x)`; the output layer applies softmax. In
/// train mode, inverted dropout zeroes each unit of the designated layers
/// with probability `dropout_rate` and scales survivors by `1/(1-rate)`,
/// so eval mode needs no rescaling.
pub fn forward_batch<T: Scalar>(
    params: &ModelParams<T>,
    spec: &ModelSpec,
    x: &Mat<T>,
    mut mode: ForwardMode<'_>,
) -> Result<ForwardPass<T>> {
    if !params.matches_spec(spec) {
        return Err(Error::domain("parameters do not match the model spec"));
    }
    if x.cols() != spec.input_width() {
        return Err(Error::domain(format!(
            "input width {} does not match the model's {}",
            x.cols(),
            spec.input_width()
        )));
    }
    if x.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite input"));
    }
    let depth = spec.depth();
    let mut inputs = Vec::with_capacity(depth);
    let mut preacts = Vec::with_capacity(depth.saturating_sub(1));
    let mut masks = Vec::with_capacity(depth.saturating_sub(1));
    let mut current = x.clone();
    for (i, layer) in params.layers.iter().enumerate() {
        let layer_index = i + 1;
        inputs.push(current.clone());
        let mut z = matmul_nt(&current, &layer.weights);
        add_bias_rows(&mut z, &layer.bias);
        if layer_index == depth {
            softmax_rows(&mut z);
            return Ok(ForwardPass {
                inputs,
                preacts,
                masks,
                probs: z,
            });
        }
        preacts.push(z.clone());
        let mut h = z;
        for v in h.data_mut() {
            *v = v.max(T::zero());
        }
        let mask = match (&mut mode, spec.has_dropout_after(layer_index)) {
            (ForwardMode::Train { dropout_rng }, true) => {
                let rate = spec.dropout_rate();
                let keep_scale = T::from_f64(1.0 / (1.0 - rate));
                let mut mask = Mat::zeros(h.rows(), h.cols());
                for m in mask.data_mut() {
                    *m = if dropout_rng.random::<f64>() < rate {
                        T::zero()
                    } else {
                        keep_scale
                    };
                }
                for (v, m) in h.data_mut().iter_mut().zip(mask.data()) {
                    *v *= *m;
                }
                Some(mask)
            }
            _ => None,
        };
        masks.push(mask);
        current = h;
    }
    unreachable!("loop returns at the output layer")
}

/// Convenience single-sample eval-mode forward; returns the probabilities.
pub fn predict_one<T: Scalar>(
    params: &ModelParams<T>,
    spec: &ModelSpec,
    x: &[T],
) -> Result<Vec<T>> {
    let m = Mat::from_vec(1, x.len(), x.to_vec());
    let pass = forward_batch(params, spec, &m, ForwardMode::Eval)?;
    Ok(pass.probs.row(0).to_vec())
}

/// Exact gradient of `cross_entropy(forward(x), targets)` with respect to
/// every weight and bias. `pass` must come from [`forward_batch`] on the
/// same parameters; dropout masks are reused from it.
pub fn backward<T: Scalar>(
    params: &ModelParams<T>,
    spec: &ModelSpec,
    pass: &ForwardPass<T>,
    targets: &Mat<T>,
) -> Result<Gradients<T>> {
    if !params.matches_spec(spec) {
        return Err(Error::domain("parameters do not match the model spec"));
    }
    if pass.inputs.len() != spec.depth()
        || pass.probs.rows() != targets.rows()
        || pass.probs.cols() != targets.cols()
    {
        return Err(Error::domain("forward cache does not match this backward call"));
    }
    let batch = pass.batch_size();
    let inv_batch = T::from_f64(1.0 / batch as f64);
    // Softmax + cross-entropy local gradient: (p - y) / batch.
    let mut dz = Mat::zeros(batch, pass.probs.cols());
    for ((d, &p), &y) in dz
        .data_mut()
        .iter_mut()
        .zip(pass.probs.data())
        .zip(targets.data())
    {
        *d = (p - y) * inv_batch;
    }

    let mut grads = Gradients::zeros_like(spec);
    for i in (0..spec.depth()).rev() {
        let input = &pass.inputs[i];
        let gw = matmul_tn(&dz, input);
        let mut gb = vec![T::zero(); dz.cols()];
        for r in 0..dz.rows() {
            for (g, &d) in gb.iter_mut().zip(dz.row(r)) {
                *g += d;
            }
        }
        grads.layers[i].weights = gw;
        grads.layers[i].bias = gb;
        if i > 0 {
            let mut da = matmul_nn(&dz, &params.layers[i].weights);
            if let Some(mask) = &pass.masks[i - 1] {
                for (v, m) in da.data_mut().iter_mut().zip(mask.data()) {
                    *v *= *m;
                }
            }
            // Rectifier derivative gates on the cached pre-activation.
            for (v, &z) in da.data_mut().iter_mut().zip(pass.preacts[i - 1].data()) {
                if z <= T::zero() {
                    *v = T::zero();
                }
            }
            dz = da;
        }
    }
    Ok(grads)
}
