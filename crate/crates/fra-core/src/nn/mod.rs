//! From-scratch dense network engine.
//!
//! Forward pass with rectifier hidden layers and a shift-stabilized softmax
//! output, inverted dropout, mean cross-entropy loss, exact backpropagation,
//! Adam updates, seeded He initialization, and the self-describing model
//! file format.
//!
//! Parameters are `f32` in production; every routine is generic over
//! [`Scalar`] so gradient checks can run the identical code in `f64`.

mod adam;
mod mat;
mod model;
mod model_io;
mod net;
mod scalar;

pub use adam::{adam_step, AdamHyper, AdamState};
pub use mat::{matmul_nn, matmul_nt, matmul_tn, Mat};
pub use model::{init, DenseLayer, Gradients, ModelParams, ModelSpec};
pub use model_io::{
    load_model, load_model_for_scheme, model_from_bytes, model_to_bytes, save_model, ModelMeta,
    SavedModel, DEFAULT_INPUT_SCALE, MODEL_MAGIC, MODEL_VERSION,
};
pub use net::{
    backward, cross_entropy, forward_batch, predict_one, softmax, ForwardMode, ForwardPass,
    LOG_CLAMP,
};
pub use scalar::Scalar;
