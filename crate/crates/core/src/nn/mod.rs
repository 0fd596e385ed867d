//! Fixed-topology feed-forward network with hand-derived backpropagation.
//!
//! Encoder: one-hot `M` → dense `M` → dense `n` → batch norm → `tanh`
//! (→ `sign` once binarized). Decoder: dense `n → M` → dense `M → M` → softmax.
//! Intermediate layers are purely linear.

mod adam;
mod batchnorm;
mod dense;
mod net;

pub use adam::{adam_step, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use batchnorm::{batchnorm_forward, BatchNormCache, BatchNormLayer, Mode, BN_EPS, BN_MOMENTUM};
pub use dense::{dense_forward, DenseGrads, DenseLayer};
pub use net::{
    backward, init_params, DecoderParams, EncoderParams, ForwardCache, Gradients, NetParams,
    Phase, ENCODER_TENSORS, TRAINABLE_TENSORS,
};

use crate::numerics::Matrix;
use crate::{Error, Result};

/// Clamp inside the logarithm of the cross-entropy.
pub const LOG_EPS: f64 = 1e-12;

/// Mean over the batch of `-Σ u_i log(b_i + LOG_EPS)`.
pub fn cross_entropy(probs: &Matrix, targets: &Matrix) -> Result<f64> {
    if probs.rows() != targets.rows() {
        return Err(Error::dim("cross_entropy", probs.rows(), targets.rows()));
    }
    if probs.cols() != targets.cols() {
        return Err(Error::dim("cross_entropy", probs.cols(), targets.cols()));
    }
    if probs.rows() == 0 {
        return Err(Error::arg("cross_entropy of an empty batch"));
    }
    let mut total = 0.0;
    for r in 0..probs.rows() {
        for (&b, &u) in probs.row(r).iter().zip(targets.row(r)) {
            if u != 0.0 {
                total -= u * libm::log(b + LOG_EPS);
            }
        }
    }
    Ok(total / probs.rows() as f64)
}
