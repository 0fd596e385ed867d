//! The end-to-end model and its two-phase training.
//!
//! Phase one trains encoder and decoder jointly with continuous `tanh` codewords
//! and a random multiplicative flip mask between them. Phase two hard-binarizes
//! the encoder output with `sign`; the true derivative of `sign` is zero, so the
//! encoder freezes and only the decoder keeps learning on binary words.

use alloc::vec::Vec;

use crate::analysis::min_distance;
use crate::channel::{binarize, sample_mask_batch, Word};
use crate::classic::Codebook;
use crate::eval::{exact_bler, run_bler_point, BlockDecoder};
use crate::nn::{adam_step, init_params, AdamState, DecoderParams, NetParams, Phase, ENCODER_TENSORS};
use crate::numerics::{argmax, softmax_rows, Matrix, Rng, Stream};
use crate::{Error, Result};

/// Crossover probability used for model selection and the training history.
pub const VALIDATION_P: f64 = 0.08;
/// Monte Carlo trials behind the restart-selection BLER.
pub const VALIDATION_TRIALS: u64 = 100_000;
/// Largest `n` for which the per-epoch history carries an exact BLER.
const EXACT_HISTORY_MAX_N: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub k: usize,
    pub n: usize,
    pub epochs_total: usize,
    pub epochs_continuous: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub mask_p_lo: f64,
    pub mask_p_hi: f64,
    pub train_samples: usize,
    pub test_samples: u64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            k: 4,
            n: 7,
            epochs_total: 150,
            epochs_continuous: 95,
            batch_size: 10,
            lr: 9e-4,
            mask_p_lo: 0.06,
            mask_p_hi: 0.1,
            train_samples: 100_000,
            test_samples: 1_000_000,
            restarts: 8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.into()));
        if self.k == 0 || self.k > 16 {
            return fail("k must be in 1..=16");
        }
        if self.n == 0 {
            return fail("n must be positive");
        }
        if self.epochs_continuous >= self.epochs_total {
            return fail("epochs_continuous must be smaller than epochs_total");
        }
        if self.batch_size < 2 {
            return fail("batch_size must be at least 2 for batch normalization");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail("lr must be positive and finite");
        }
        if !(0.0 <= self.mask_p_lo && self.mask_p_lo <= self.mask_p_hi && self.mask_p_hi <= 1.0) {
            return fail("mask range must satisfy 0 <= mask_p_lo <= mask_p_hi <= 1");
        }
        if self.train_samples < self.batch_size {
            return fail("train_samples must cover at least one mini-batch");
        }
        if self.test_samples == 0 {
            return fail("test_samples must be positive");
        }
        if self.restarts == 0 {
            return fail("restarts must be at least 1");
        }
        Ok(())
    }

    pub fn messages(&self) -> usize {
        1 << self.k
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// 0 is the untrained network.
    pub epoch: usize,
    pub phase: Phase,
    pub mean_loss: f64,
    /// Exact BLER of the extracted codebook under the neural decoder at
    /// [`VALIDATION_P`]; `None` when `n` is too large to enumerate.
    pub val_bler: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub params: NetParams,
    pub codebook: Codebook,
    pub config: TrainConfig,
    pub phase: Phase,
    pub history: Vec<EpochRecord>,
}

impl TrainedModel {
    pub fn decoder(&self) -> NeuralDecoder<'_> {
        NeuralDecoder::new(&self.params)
    }
}

/// Encoder output for a batch.
#[derive(Debug, Clone, PartialEq)]
pub enum Encoded {
    Continuous(Matrix),
    Binary(Vec<Word>),
}

/// Inference-mode encoder (batch norm on running statistics).
pub fn encode_forward(params: &NetParams, messages: &[usize], phase: Phase) -> Result<Encoded> {
    let m = params.messages();
    if let Some(&bad) = messages.iter().find(|&&id| id >= m) {
        return Err(Error::arg(alloc::format!("message id {bad} out of range 0..{m}")));
    }
    let one_hot = Matrix::one_hot(messages, m)?;
    let hidden = params.encoder.input.forward(&one_hot)?;
    let pre = params.encoder.output.forward(&hidden)?;
    let out = params.encoder.norm.normalize_eval(&pre)?.map(libm::tanh);
    Ok(match phase {
        Phase::Continuous => Encoded::Continuous(out),
        Phase::Binarized => Encoded::Binary(
            (0..out.rows())
                .map(|r| binarize(out.row(r)))
                .collect::<Result<Vec<_>>>()?,
        ),
    })
}

/// Softmax probabilities for a batch of received vectors (`rows × n`).
pub fn decode_forward(params: &NetParams, received: &Matrix) -> Result<Matrix> {
    Ok(softmax_rows(&params.decoder.logits(received)?))
}

/// Binarized encoder outputs for every message, in message order.
/// Duplicate words are kept; see [`Codebook::distinct`].
pub fn extract_codebook(params: &NetParams) -> Codebook {
    let messages: Vec<usize> = (0..params.messages()).collect();
    let words = match encode_forward(params, &messages, Phase::Binarized) {
        Ok(Encoded::Binary(words)) => words,
        _ => unreachable!("message ids are in range and outputs are finite"),
    };
    Codebook::new(params.k, params.n, words).expect("one word of length n per message")
}

/// The decoder half of a network as a hard-decision decoder.
#[derive(Debug, Clone, Copy)]
pub struct NeuralDecoder<'a> {
    decoder: &'a DecoderParams,
    n: usize,
}

impl<'a> NeuralDecoder<'a> {
    pub fn new(params: &'a NetParams) -> Self {
        NeuralDecoder {
            decoder: &params.decoder,
            n: params.n,
        }
    }

    /// Decisions for a batch of words.
    pub fn decide_batch(&self, words: &[Word]) -> Result<Vec<usize>> {
        let received = Matrix::from_fn(words.len(), self.n, |r, c| words[r].symbols()[c] as f64);
        let probs = softmax_rows(&self.decoder.logits(&received)?);
        Ok((0..probs.rows()).map(|r| argmax(probs.row(r))).collect())
    }
}

impl BlockDecoder for NeuralDecoder<'_> {
    fn n(&self) -> usize {
        self.n
    }

    fn decode(&self, y: &Word) -> usize {
        let received = Matrix::from_fn(1, self.n, |_, c| y.symbols()[c] as f64);
        let logits = self.decoder.logits(&received).expect("word length matches decoder");
        argmax(softmax_rows(&logits).row(0))
    }
}

fn history_bler(params: &NetParams) -> Result<Option<f64>> {
    if params.n > EXACT_HISTORY_MAX_N {
        return Ok(None);
    }
    let codebook = extract_codebook(params);
    exact_bler(&codebook, &NeuralDecoder::new(params), VALIDATION_P).map(Some)
}

/// Two-phase training run, fully determined by `cfg` (including `cfg.seed`).
pub fn train(cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    let m = cfg.messages();
    let mut params = init_params(cfg, &mut Rng::new(cfg.seed, Stream::Init))?;
    let mut data_rng = Rng::new(cfg.seed, Stream::Data);
    let mut data: Vec<usize> = (0..cfg.train_samples).map(|_| data_rng.below(m)).collect();
    let mut shuffle_rng = Rng::new(cfg.seed, Stream::Shuffle);
    let mut mask_rng = Rng::new(cfg.seed, Stream::Mask);
    let mut adam = AdamState::for_params(&params, cfg.lr);
    let mut history = Vec::with_capacity(cfg.epochs_total + 1);

    // Epoch 0: loss of the untrained network, no updates.
    let mut probe_rng = Rng::new(cfg.seed, Stream::Validation);
    let mut total = 0.0;
    let mut batches = 0usize;
    for chunk in data.chunks_exact(cfg.batch_size) {
        let masks = sample_mask_batch(chunk.len(), cfg.n, cfg.mask_p_lo, cfg.mask_p_hi, &mut probe_rng)?;
        total += params.forward_train(chunk, &masks, Phase::Continuous)?.loss()?;
        batches += 1;
    }
    history.push(EpochRecord {
        epoch: 0,
        phase: Phase::Continuous,
        mean_loss: total / batches as f64,
        val_bler: history_bler(&params)?,
    });

    for epoch in 1..=cfg.epochs_total {
        let phase = if epoch <= cfg.epochs_continuous {
            Phase::Continuous
        } else {
            Phase::Binarized
        };
        if epoch == cfg.epochs_continuous + 1 {
            // The encoder leaves the gradient path; drop its momentum so it
            // stays exactly where pretraining left it.
            for i in 0..ENCODER_TENSORS {
                adam.clear_moments(i);
            }
        }
        shuffle_rng.shuffle(&mut data);
        let mut total = 0.0;
        let mut batches = 0usize;
        for chunk in data.chunks_exact(cfg.batch_size) {
            let masks = sample_mask_batch(chunk.len(), cfg.n, cfg.mask_p_lo, cfg.mask_p_hi, &mut mask_rng)?;
            let cache = params.forward_train(chunk, &masks, phase)?;
            let loss = cache.loss()?;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            let grads = params.backward(Some(&cache), &cache.one_hot)?;
            if !grads.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            adam_step(&mut adam, &mut params, &grads)?;
            params.update_running_stats(&cache);
            total += loss;
            batches += 1;
        }
        history.push(EpochRecord {
            epoch,
            phase,
            mean_loss: total / batches as f64,
            val_bler: history_bler(&params)?,
        });
    }

    let codebook = extract_codebook(&params);
    Ok(TrainedModel {
        params,
        codebook,
        config: cfg.clone(),
        phase: Phase::Binarized,
        history,
    })
}

/// Outcome of one restart, used for selection and reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartSummary {
    pub index: usize,
    pub seed: u64,
    pub d_min: usize,
    pub distinct_words: usize,
    /// Monte Carlo BLER at [`VALIDATION_P`] with the model's own decoder.
    pub val_bler: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub best: TrainedModel,
    pub best_index: usize,
    pub summaries: Vec<RestartSummary>,
}

/// Config of restart `index`: identical to `cfg` except `seed + index`.
pub fn restart_config(cfg: &TrainConfig, index: usize) -> TrainConfig {
    TrainConfig {
        seed: cfg.seed.wrapping_add(index as u64),
        ..cfg.clone()
    }
}

/// Trains restart `index` and scores it. The validation noise is drawn from
/// the base seed so every restart is scored on the same channel draws.
pub fn run_restart(cfg: &TrainConfig, index: usize) -> Result<(TrainedModel, RestartSummary)> {
    let run_cfg = restart_config(cfg, index);
    let model = train(&run_cfg)?;
    let mut rng = Rng::new(cfg.seed, Stream::Validation);
    let point = run_bler_point(&model.codebook, &model.decoder(), VALIDATION_P, VALIDATION_TRIALS, &mut rng)?;
    let summary = RestartSummary {
        index,
        seed: run_cfg.seed,
        d_min: min_distance(&model.codebook)?,
        distinct_words: model.codebook.distinct(),
        val_bler: point.bler,
    };
    Ok((model, summary))
}

/// Largest `d_min`, then lowest validation BLER, then lowest index.
pub fn select_best(summaries: &[RestartSummary]) -> Option<usize> {
    summaries
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            b.d_min
                .cmp(&a.d_min)
                .then(a.val_bler.total_cmp(&b.val_bler))
                .then(a.index.cmp(&b.index))
        })
        .map(|(i, _)| i)
}

/// Sequential restarts. Parallel drivers can combine [`run_restart`] and
/// [`select_best`] to get the same result.
pub fn train_with_restarts(cfg: &TrainConfig) -> Result<RestartOutcome> {
    cfg.validate()?;
    let mut models = Vec::with_capacity(cfg.restarts);
    let mut summaries = Vec::with_capacity(cfg.restarts);
    for index in 0..cfg.restarts {
        let (model, summary) = run_restart(cfg, index)?;
        models.push(model);
        summaries.push(summary);
    }
    let best_index = select_best(&summaries).expect("at least one restart");
    Ok(RestartOutcome {
        best: models.swap_remove(best_index),
        best_index,
        summaries,
    })
}
