//! Parallel drivers. Each restart and each grid point owns its random
//! streams, so results match the sequential core functions bit for bit.

use binae::analysis::hamming_equivalence;
use binae::autoencoder::{run_restart, select_best, NeuralDecoder, RestartOutcome, TrainConfig};
use binae::classic::{hamming74_codebook, Codebook};
use binae::eval::{
    point_rng, run_bler_point, AlignedDecoder, BlerCurve, BlockDecoder, BlockEncoder, EvalConfig, LookupDecoder,
    MlDecoder, Pairing,
};
use binae::nn::NetParams;
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Same result as `binae::autoencoder::train_with_restarts`, one restart per thread.
pub fn train_restarts(cfg: &TrainConfig) -> Result<RestartOutcome> {
    cfg.validate()?;
    let mut runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(cfg, i))
        .collect::<binae::Result<Vec<_>>>()?;
    let summaries: Vec<_> = runs.iter().map(|(_, s)| s.clone()).collect();
    let best_index = select_best(&summaries).expect("at least one restart");
    let (best, _) = runs.swap_remove(best_index);
    Ok(RestartOutcome {
        best,
        best_index,
        summaries,
    })
}

/// Same result as `binae::eval::run_bler`, one grid point per task.
pub fn bler_curve<E, D>(cfg: &EvalConfig, encoder: &E, decoder: &D) -> Result<BlerCurve>
where
    E: BlockEncoder + Sync + ?Sized,
    D: BlockDecoder + Sync + ?Sized,
{
    cfg.validate()?;
    let points = cfg
        .p_grid
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut rng = point_rng(cfg.seed, cfg.pairing, i);
            run_bler_point(encoder, decoder, p, cfg.trials_per_p, &mut rng)
        })
        .collect::<binae::Result<Vec<_>>>()?;
    Ok(BlerCurve { points })
}

/// Encoder codebook and tabulated decoder of a pairing. `model` supplies the
/// learned codebook and network for the autoencoder pairings.
pub fn pairing_parts(pairing: Pairing, model: Option<(&Codebook, &NetParams)>) -> Result<(Codebook, LookupDecoder)> {
    let hamming = hamming74_codebook();
    if pairing == Pairing::HammingMl {
        let decoder = LookupDecoder::tabulate(&MlDecoder(&hamming))?;
        return Ok((hamming, decoder));
    }
    let (learned, params) =
        model.ok_or_else(|| CliError::config(format!("pairing {} needs a trained model", pairing.tag())))?;
    let neural = NeuralDecoder::new(params);
    match pairing {
        Pairing::HammingMl => unreachable!(),
        Pairing::HammingAeDec => {
            let eq = hamming_equivalence(learned)?;
            let perm = eq.permutation.ok_or_else(|| {
                CliError::config(
                    "pairing hamming-aedec needs a learned code equivalent to Hamming(7,4); \
                     this model's code is not, so its decoder has no Hamming labelling",
                )
            })?;
            let aligned = AlignedDecoder::new(neural, learned, &hamming, &eq.translation, &perm)?;
            Ok((hamming, LookupDecoder::tabulate(&aligned)?))
        }
        Pairing::AeMl => Ok((learned.clone(), LookupDecoder::tabulate(&MlDecoder(learned))?)),
        Pairing::AeAeDec => Ok((learned.clone(), LookupDecoder::tabulate(&neural)?)),
    }
}
