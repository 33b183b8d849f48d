//! Adam optimizer with bias correction.

use super::model::{Gradients, ModelParams, ModelSpec};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Optimizer hyperparameters. The learning-rate default is 1e-4; the
/// moment coefficients and epsilon are the standard constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            learning_rate: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamHyper {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamHyper {
            learning_rate,
            ..Default::default()
        }
    }
}

/// First and second moment accumulators plus the step counter.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    m: ModelParams<T>,
    v: ModelParams<T>,
    t: u64,
    pub hyper: AdamHyper,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(spec: &ModelSpec, hyper: AdamHyper) -> Self {
        AdamState {
            m: ModelParams::zeros_like(spec),
            v: ModelParams::zeros_like(spec),
            t: 0,
            hyper,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One Adam update:
/// `t += 1; m <- b1 m + (1-b1) g; v <- b2 v + (1-b2) g^2;`
/// `theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)`.
pub fn adam_step<T: Scalar>(
    params: &mut ModelParams<T>,
    grads: &Gradients<T>,
    state: &mut AdamState<T>,
) -> Result<()> {
    if params.layers.len() != grads.layers.len() {
        return Err(Error::domain("gradient layout does not match parameters"));
    }
    for (i, g) in grads.layers.iter().enumerate() {
        let bad_w = g.weights.data().iter().any(|v| !v.is_finite());
        let bad_b = g.bias.iter().any(|v| !v.is_finite());
        if bad_w || bad_b {
            let tensor = if bad_w { "weights" } else { "bias" };
            return Err(Error::numerical(
                format!("layer {} {tensor}", i + 1),
                "non-finite gradient",
            ));
        }
    }
    state.t += 1;
    let h = state.hyper;
    let lr = T::from_f64(h.learning_rate);
    let b1 = T::from_f64(h.beta1);
    let b2 = T::from_f64(h.beta2);
    let one = T::one();
    let eps = T::from_f64(h.epsilon);
    let bc1 = T::from_f64(1.0 - h.beta1.powi(state.t as i32));
    let bc2 = T::from_f64(1.0 - h.beta2.powi(state.t as i32));
    let update = |theta: &mut [T], g: &[T], m: &mut [T], v: &mut [T]| {
        for (((t, &gv), mv), vv) in theta.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
            *mv = b1 * *mv + (one - b1) * gv;
            *vv = b2 * *vv + (one - b2) * gv * gv;
            let m_hat = *mv / bc1;
            let v_hat = *vv / bc2;
            *t = *t - lr * m_hat / (v_hat.sqrt() + eps);
        }
    };
    for ((p, g), (m, v)) in params
        .layers
        .iter_mut()
        .zip(&grads.layers)
        .zip(state.m.layers.iter_mut().zip(state.v.layers.iter_mut()))
    {
        update(
            p.weights.data_mut(),
            g.weights.data(),
            m.weights.data_mut(),
            v.weights.data_mut(),
        );
        update(&mut p.bias, &g.bias, &mut m.bias, &mut v.bias);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::model::init;
    use approx::assert_relative_eq;

    fn scalar_spec() -> ModelSpec {
        ModelSpec::without_dropout(vec![1, 1]).unwrap()
    }

    fn grad_of(spec: &ModelSpec, value: f64) -> Gradients<f64> {
        let mut g = Gradients::zeros_like(spec);
        g.layers[0].weights.data_mut()[0] = value;
        g
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let spec = ModelSpec::without_dropout(vec![4, 3, 2]).unwrap();
        let mut params: ModelParams<f64> = init(&spec, 1);
        let before = params.clone();
        let grads = Gradients::zeros_like(&spec);
        let mut state = AdamState::new(&spec, AdamHyper::default());
        adam_step(&mut params, &grads, &mut state).unwrap();
        assert_eq!(params, before);
    }

    #[test]
    fn first_step_magnitude_is_one_learning_rate() {
        // With bias correction the first step is lr * g / (|g| + eps).
        let spec = scalar_spec();
        let mut params = ModelParams::<f64>::zeros_like(&spec);
        let mut state = AdamState::new(&spec, AdamHyper::default());
        adam_step(&mut params, &grad_of(&spec, 3.5), &mut state).unwrap();
        let theta = params.layers[0].weights.data()[0];
        let expect = -1e-4 * 3.5 / (3.5 + 1e-8);
        assert_relative_eq!(theta, expect, epsilon = 1e-18);
        assert_relative_eq!(theta.abs(), 1e-4, max_relative = 1e-6);
    }

    #[test]
    fn two_steps_match_hand_evaluated_recurrence() {
        // Constant gradient 1 at lr 0.1, recurrence evaluated independently.
        let spec = scalar_spec();
        let mut params = ModelParams::<f64>::zeros_like(&spec);
        let hyper = AdamHyper::with_learning_rate(0.1);
        let mut state = AdamState::new(&spec, hyper);
        adam_step(&mut params, &grad_of(&spec, 1.0), &mut state).unwrap();
        adam_step(&mut params, &grad_of(&spec, 1.0), &mut state).unwrap();
        let got = params.layers[0].weights.data()[0];

        let (b1, b2, eps, lr) = (0.9f64, 0.999f64, 1e-8f64, 0.1f64);
        let mut theta = 0.0f64;
        let (mut m, mut v) = (0.0f64, 0.0f64);
        for t in 1..=2 {
            let g = 1.0;
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let m_hat = m / (1.0 - b1.powi(t));
            let v_hat = v / (1.0 - b2.powi(t));
            theta -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        assert_relative_eq!(got, theta, epsilon = 1e-12);
    }

    #[test]
    fn non_finite_gradient_names_the_tensor() {
        let spec = ModelSpec::without_dropout(vec![2, 3, 2]).unwrap();
        let mut params: ModelParams<f64> = init(&spec, 1);
        let mut grads = Gradients::zeros_like(&spec);
        grads.layers[1].bias[0] = f64::NAN;
        let mut state = AdamState::new(&spec, AdamHyper::default());
        match adam_step(&mut params, &grads, &mut state) {
            Err(crate::error::Error::Numerical { context, .. }) => {
                assert!(context.contains("layer 2"), "context: {context}");
                assert!(context.contains("bias"));
            }
            other => panic!("expected numerical error, got {other:?}"),
        }
    }
}
