//! Architecture descriptions, parameter storage, and initialization.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::mat::Mat;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Shape of one network: layer widths from input to output, plus dropout
/// placement. Hidden layers apply the rectifier, the output layer softmax.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    widths: Vec<usize>,
    dropout_after: Vec<usize>,
    dropout_rate: f64,
}

impl ModelSpec {
    /// `widths` runs input, hidden..., output; `dropout_after` lists the
    /// 1-based hidden layers whose activations are dropped during training.
    pub fn new(widths: Vec<usize>, dropout_after: Vec<usize>, dropout_rate: f64) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::domain("a model needs at least one learnable layer"));
        }
        if widths.iter().any(|&w| w == 0) {
            return Err(Error::domain("layer widths must be >= 1"));
        }
        let depth = widths.len() - 1;
        let mut dropout_after = dropout_after;
        dropout_after.sort_unstable();
        dropout_after.dedup();
        if dropout_after.iter().any(|&i| i == 0 || i >= depth) {
            return Err(Error::domain(format!(
                "dropout indices must name hidden layers 1..{depth}"
            )));
        }
        if !(0.0..1.0).contains(&dropout_rate) {
            return Err(Error::domain(format!(
                "dropout rate must lie in [0, 1), got {dropout_rate}"
            )));
        }
        if !dropout_after.is_empty() && dropout_rate == 0.0 {
            return Err(Error::domain(
                "dropout layers listed but the rate is zero",
            ));
        }
        Ok(ModelSpec {
            widths,
            dropout_after,
            dropout_rate,
        })
    }

    pub fn without_dropout(widths: Vec<usize>) -> Result<Self> {
        Self::new(widths, Vec::new(), 0.0)
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// Number of learnable layers.
    pub fn depth(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn output_width(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn dropout_after(&self) -> &[usize] {
        &self.dropout_after
    }

    pub fn dropout_rate(&self) -> f64 {
        self.dropout_rate
    }

    pub fn has_dropout_after(&self, layer: usize) -> bool {
        self.dropout_after.binary_search(&layer).is_ok()
    }
}

/// One dense layer: weights (out x in) and bias (out).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    pub weights: Mat<T>,
    pub bias: Vec<T>,
}

/// All trainable tensors of a model. Also reused as the container shape for
/// gradients and Adam moments.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    pub layers: Vec<DenseLayer<T>>,
}

impl<T: Scalar> ModelParams<T> {
    pub fn zeros_like(spec: &ModelSpec) -> Self {
        let layers = spec
            .widths()
            .windows(2)
            .map(|w| DenseLayer {
                weights: Mat::zeros(w[1], w[0]),
                bias: vec![T::zero(); w[1]],
            })
            .collect();
        ModelParams { layers }
    }

    pub fn matches_spec(&self, spec: &ModelSpec) -> bool {
        self.layers.len() == spec.depth()
            && spec.widths().windows(2).zip(&self.layers).all(|(w, l)| {
                l.weights.rows() == w[1] && l.weights.cols() == w[0] && l.bias.len() == w[1]
            })
    }

    pub fn count(&self) -> u64 {
        self.layers
            .iter()
            .map(|l| (l.weights.rows() * l.weights.cols() + l.bias.len()) as u64)
            .sum()
    }

    /// Converts element type (f32 storage <-> f64 verification mode).
    pub fn convert<U: Scalar>(&self) -> ModelParams<U> {
        ModelParams {
            layers: self
                .layers
                .iter()
                .map(|l| DenseLayer {
                    weights: l.weights.map(|v| U::from_f64(v.into_f64())),
                    bias: l.bias.iter().map(|v| U::from_f64(v.into_f64())).collect(),
                })
                .collect(),
        }
    }
}

/// Gradients share the parameter layout.
pub type Gradients<T> = ModelParams<T>;

/// Seeded He initialization: weights ~ N(0, 2 / fan_in), biases zero.
/// The underlying f64 draws are identical for both element types.
pub fn init<T: Scalar>(spec: &ModelSpec, seed: u64) -> ModelParams<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(spec.depth());
    for w in spec.widths().windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let std = (2.0 / fan_in as f64).sqrt();
        let dist = Normal::new(0.0, std).expect("std is finite and positive");
        let mut weights = Mat::zeros(fan_out, fan_in);
        for v in weights.data_mut() {
            *v = T::from_f64(dist.sample(&mut rng));
        }
        layers.push(DenseLayer {
            weights,
            bias: vec![T::zero(); fan_out],
        });
    }
    ModelParams { layers }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::without_dropout(vec![4]).is_err());
        assert!(ModelSpec::without_dropout(vec![4, 0, 3]).is_err());
        assert!(ModelSpec::new(vec![4, 3, 2], vec![2], 0.5).is_err(), "output dropout");
        assert!(ModelSpec::new(vec![4, 3, 2], vec![1], 1.0).is_err());
        assert!(ModelSpec::new(vec![4, 3, 2], vec![1], 0.5).is_ok());
        let s = ModelSpec::new(vec![4, 3, 3, 2], vec![2, 1, 2], 0.5).unwrap();
        assert_eq!(s.dropout_after(), &[1, 2]);
        assert_eq!(s.depth(), 3);
    }

    #[test]
    fn init_shapes_match_spec() {
        let spec = ModelSpec::without_dropout(vec![6, 5, 4, 3]).unwrap();
        let params: ModelParams<f32> = init(&spec, 1);
        assert!(params.matches_spec(&spec));
        assert_eq!(params.layers[0].weights.rows(), 5);
        assert_eq!(params.layers[0].weights.cols(), 6);
        assert_eq!(params.layers[2].bias.len(), 3);
        assert_eq!(params.count(), (6 * 5 + 5 + 5 * 4 + 4 + 4 * 3 + 3) as u64);
    }

    #[test]
    fn init_is_seed_deterministic() {
        let spec = ModelSpec::without_dropout(vec![8, 4, 2]).unwrap();
        let a: ModelParams<f32> = init(&spec, 9);
        let b: ModelParams<f32> = init(&spec, 9);
        assert_eq!(a, b);
        let c: ModelParams<f32> = init(&spec, 10);
        assert_ne!(a, c);
    }

    #[test]
    fn init_variance_tracks_fan_in() {
        // Sample variance of a 2000 x 2000 draw within 5% of 2/2000.
        let spec = ModelSpec::without_dropout(vec![2000, 2000]).unwrap();
        let params: ModelParams<f64> = init(&spec, 3);
        let data = params.layers[0].weights.data();
        let n = data.len() as f64;
        let mean: f64 = data.iter().sum::<f64>() / n;
        let var: f64 = data.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let expect = 2.0 / 2000.0;
        assert!(
            (var - expect).abs() / expect < 0.05,
            "variance {var} vs {expect}"
        );
        // Biases start at zero.
        assert!(params.layers[0].bias.iter().all(|&b| b == 0.0));
    }
}
