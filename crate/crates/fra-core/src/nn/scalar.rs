//! Float abstraction: the engine trains in f32 and verifies gradients in f64.

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, NumAssign};

/// Element type of network parameters and activations.
pub trait Scalar: Float + NumAssign + Sum + Default + Debug + Send + Sync + 'static {
    fn from_f64(v: f64) -> Self;
    fn into_f64(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn into_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline]
    fn into_f64(self) -> f64 {
        self
    }
}
