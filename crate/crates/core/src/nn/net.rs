use alloc::vec::Vec;

use super::{cross_entropy, BatchNormCache, BatchNormLayer, DenseLayer};
use crate::autoencoder::TrainConfig;
use crate::channel::Word;
use crate::numerics::{softmax_rows, Matrix, Rng};
use crate::{Error, Result};

/// Number of trainable tensors; the first [`ENCODER_TENSORS`] belong to the encoder.
pub const TRAINABLE_TENSORS: usize = 10;
pub const ENCODER_TENSORS: usize = 6;

/// Encoder output mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// `tanh` outputs in `(-1, 1)`; batch norm uses batch statistics.
    Continuous,
    /// `sign` of the eval-mode `tanh` output; the encoder is off the gradient path.
    Binarized,
}

impl Phase {
    pub fn tag(self) -> &'static str {
        match self {
            Phase::Continuous => "continuous",
            Phase::Binarized => "binarized",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    /// `M → M`
    pub input: DenseLayer,
    /// `M → n`
    pub output: DenseLayer,
    pub norm: BatchNormLayer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderParams {
    /// `n → M`
    pub hidden: DenseLayer,
    /// `M → M`
    pub output: DenseLayer,
}

impl DecoderParams {
    /// Logits for a batch of received vectors.
    pub fn logits(&self, received: &Matrix) -> Result<Matrix> {
        let hidden = self.hidden.forward(received)?;
        self.output.forward(&hidden)
    }
}

/// All weights of encoder and decoder plus batch-norm state.
#[derive(Debug, Clone, PartialEq)]
pub struct NetParams {
    pub k: usize,
    pub n: usize,
    pub encoder: EncoderParams,
    pub decoder: DecoderParams,
}

/// Gradient buffers in trainable-tensor order (see [`NetParams::tensor_names`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub buffers: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn tensors(&self) -> Vec<&[f64]> {
        self.buffers.iter().map(|b| b.as_slice()).collect()
    }

    pub fn encoder_is_zero(&self) -> bool {
        self.buffers[..ENCODER_TENSORS]
            .iter()
            .all(|b| b.iter().all(|&g| g == 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.buffers.iter().flatten().all(|g| g.is_finite())
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.buffers.iter().flatten().map(|g| g * g).sum())
    }
}

/// Everything the backward pass needs from one training-mode forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub phase: Phase,
    pub messages: Vec<usize>,
    pub one_hot: Matrix,
    pub hidden: Matrix,
    pub batch_norm: Option<BatchNormCache>,
    /// Encoder output after `tanh` (continuous) or `sign` (binarized).
    pub encoded: Matrix,
    pub mask: Matrix,
    pub received: Matrix,
    pub decoder_hidden: Matrix,
    pub probs: Matrix,
}

impl ForwardCache {
    pub fn loss(&self) -> Result<f64> {
        cross_entropy(&self.probs, &self.one_hot)
    }
}

impl NetParams {
    /// Glorot-uniform weights, zero biases, identity batch norm.
    pub fn init(k: usize, n: usize, rng: &mut Rng) -> Result<Self> {
        if k == 0 || n == 0 || k > 16 {
            return Err(Error::arg("need 1 <= k <= 16 and n >= 1"));
        }
        let m = 1usize << k;
        Ok(NetParams {
            k,
            n,
            encoder: EncoderParams {
                input: DenseLayer::glorot(m, m, rng),
                output: DenseLayer::glorot(m, n, rng),
                norm: BatchNormLayer::new(n),
            },
            decoder: DecoderParams {
                hidden: DenseLayer::glorot(n, m, rng),
                output: DenseLayer::glorot(m, m, rng),
            },
        })
    }

    pub fn messages(&self) -> usize {
        1 << self.k
    }

    pub fn tensor_names() -> [&'static str; TRAINABLE_TENSORS] {
        [
            "encoder.input.weight",
            "encoder.input.bias",
            "encoder.output.weight",
            "encoder.output.bias",
            "encoder.norm.gamma",
            "encoder.norm.beta",
            "decoder.hidden.weight",
            "decoder.hidden.bias",
            "decoder.output.weight",
            "decoder.output.bias",
        ]
    }

    pub fn trainable(&self) -> [&[f64]; TRAINABLE_TENSORS] {
        let (e, d) = (&self.encoder, &self.decoder);
        [
            e.input.weight.data(),
            &e.input.bias,
            e.output.weight.data(),
            &e.output.bias,
            &e.norm.gamma,
            &e.norm.beta,
            d.hidden.weight.data(),
            &d.hidden.bias,
            d.output.weight.data(),
            &d.output.bias,
        ]
    }

    pub fn trainable_mut(&mut self) -> [&mut [f64]; TRAINABLE_TENSORS] {
        let EncoderParams {
            input,
            output,
            norm,
        } = &mut self.encoder;
        let DecoderParams {
            hidden,
            output: dec_out,
        } = &mut self.decoder;
        [
            input.weight.data_mut(),
            &mut input.bias,
            output.weight.data_mut(),
            &mut output.bias,
            &mut norm.gamma,
            &mut norm.beta,
            hidden.weight.data_mut(),
            &mut hidden.bias,
            dec_out.weight.data_mut(),
            &mut dec_out.bias,
        ]
    }

    /// Trainable scalars plus the two running-statistic vectors.
    pub fn parameter_count(&self) -> usize {
        self.trainable().iter().map(|t| t.len()).sum::<usize>() + 2 * self.n
    }

    fn check_batch(&self, messages: &[usize], masks: &[Word]) -> Result<()> {
        if messages.len() != masks.len() {
            return Err(Error::dim("forward_train", messages.len(), masks.len()));
        }
        if let Some(bad) = masks.iter().find(|w| w.len() != self.n) {
            return Err(Error::dim("forward_train", self.n, bad.len()));
        }
        if messages.iter().any(|&m| m >= self.messages()) {
            return Err(Error::arg("message id out of range"));
        }
        Ok(())
    }

    /// Training forward pass: encoder, multiplicative channel mask, decoder,
    /// softmax. Batch-norm running statistics are not touched; call
    /// [`NetParams::update_running_stats`] with the returned cache.
    pub fn forward_train(
        &self,
        messages: &[usize],
        masks: &[Word],
        phase: Phase,
    ) -> Result<ForwardCache> {
        self.check_batch(messages, masks)?;
        let one_hot = Matrix::one_hot(messages, self.messages())?;
        // The input is one-hot, so the first layer is a column lookup.
        let first = &self.encoder.input;
        let hidden = Matrix::from_fn(messages.len(), first.outputs(), |r, c| {
            first.weight.get(c, messages[r]) + first.bias[c]
        });
        let pre_norm = self.encoder.output.forward(&hidden)?;
        let (encoded, batch_norm) = match phase {
            Phase::Continuous => {
                let (normed, cache) = self.encoder.norm.normalize_batch(&pre_norm)?;
                (normed.map(libm::tanh), Some(cache))
            }
            Phase::Binarized => {
                let normed = self.encoder.norm.normalize_eval(&pre_norm)?;
                (normed.map(|v| if v < 0.0 { -1.0 } else { 1.0 }), None)
            }
        };
        let mask = Matrix::from_fn(masks.len(), self.n, |r, c| masks[r].symbols()[c] as f64);
        let received = encoded.hadamard(&mask)?;
        let decoder_hidden = self.decoder.hidden.forward(&received)?;
        let logits = self.decoder.output.forward(&decoder_hidden)?;
        let probs = softmax_rows(&logits);
        Ok(ForwardCache {
            phase,
            messages: messages.to_vec(),
            one_hot,
            hidden,
            batch_norm,
            encoded,
            mask,
            received,
            decoder_hidden,
            probs,
        })
    }

    pub fn update_running_stats(&mut self, cache: &ForwardCache) {
        if let Some(bn) = &cache.batch_norm {
            self.encoder.norm.update_running(bn);
        }
    }

    /// Exact gradients of the mean cross-entropy. Under [`Phase::Binarized`]
    /// the derivative of `sign` is zero, so every encoder buffer is exactly zero.
    pub fn backward(&self, cache: Option<&ForwardCache>, target: &Matrix) -> Result<Gradients> {
        let cache = cache.ok_or(Error::MissingCache)?;
        let probs = &cache.probs;
        if target.rows() != probs.rows() || target.cols() != probs.cols() {
            return Err(Error::dim("backward", probs.rows() * probs.cols(), target.rows() * target.cols()));
        }
        let inv_b = 1.0 / probs.rows() as f64;
        let d_logits = Matrix::from_fn(probs.rows(), probs.cols(), |r, c| {
            (probs.get(r, c) - target.get(r, c)) * inv_b
        });
        let (g_dec_out, d_dec_hidden) = self.decoder.output.backward(&cache.decoder_hidden, &d_logits)?;
        let (g_dec_hidden, d_received) = self.decoder.hidden.backward(&cache.received, &d_dec_hidden)?;

        let m = self.messages();
        let encoder = match (cache.phase, &cache.batch_norm) {
            (Phase::Binarized, _) => [
                alloc::vec![0.0; m * m],
                alloc::vec![0.0; m],
                alloc::vec![0.0; self.n * m],
                alloc::vec![0.0; self.n],
                alloc::vec![0.0; self.n],
                alloc::vec![0.0; self.n],
            ],
            (Phase::Continuous, None) => return Err(Error::MissingCache),
            (Phase::Continuous, Some(bn)) => {
                // received = tanh(bn_out) ⊙ mask
                let d_bn_out = Matrix::from_fn(d_received.rows(), self.n, |r, c| {
                    let t = cache.encoded.get(r, c);
                    d_received.get(r, c) * cache.mask.get(r, c) * (1.0 - t * t)
                });
                let (d_gamma, d_beta, d_pre_norm) = self.encoder.norm.backward(bn, &d_bn_out);
                let (g_enc_out, d_hidden) = self.encoder.output.backward(&cache.hidden, &d_pre_norm)?;
                let mut g_first = Matrix::zeros(m, m);
                for (r, &msg) in cache.messages.iter().enumerate() {
                    for c in 0..m {
                        let g = g_first.get(c, msg) + d_hidden.get(r, c);
                        g_first.set(c, msg, g);
                    }
                }
                [
                    g_first.into_vec(),
                    d_hidden.column_sums(),
                    g_enc_out.weight.into_vec(),
                    g_enc_out.bias,
                    d_gamma,
                    d_beta,
                ]
            }
        };
        let mut buffers: Vec<Vec<f64>> = encoder.into_iter().collect();
        buffers.extend([
            g_dec_hidden.weight.into_vec(),
            g_dec_hidden.bias,
            g_dec_out.weight.into_vec(),
            g_dec_out.bias,
        ]);
        Ok(Gradients { buffers })
    }
}

pub fn init_params(cfg: &TrainConfig, rng: &mut Rng) -> Result<NetParams> {
    NetParams::init(cfg.k, cfg.n, rng)
}

pub fn backward(params: &NetParams, cache: Option<&ForwardCache>, target: &Matrix) -> Result<Gradients> {
    params.backward(cache, target)
}
