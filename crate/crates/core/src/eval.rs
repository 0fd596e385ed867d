//! Block error rate over the BSC: Monte Carlo estimates with binomial error
//! bars, exact enumeration for short blocks, and curve comparison.

use alloc::vec::Vec;

use crate::channel::{bsc_apply, BscParams, Word};
use crate::classic::{ml_decode, Codebook};
use crate::numerics::{Rng, Stream};
use crate::{Error, Result};

/// Anything that maps a message id to a transmit word.
pub trait BlockEncoder {
    fn k(&self) -> usize;
    fn n(&self) -> usize;
    fn encode(&self, message: usize) -> &Word;
}

impl BlockEncoder for Codebook {
    fn k(&self) -> usize {
        Codebook::k(self)
    }

    fn n(&self) -> usize {
        Codebook::n(self)
    }

    fn encode(&self, message: usize) -> &Word {
        self.word(message)
    }
}

/// Hard-decision decoder from received words to message ids.
pub trait BlockDecoder {
    fn n(&self) -> usize;
    fn decode(&self, y: &Word) -> usize;
}

/// Exhaustive minimum-distance decoder over a codebook.
#[derive(Debug, Clone, Copy)]
pub struct MlDecoder<'a>(pub &'a Codebook);

impl BlockDecoder for MlDecoder<'_> {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn decode(&self, y: &Word) -> usize {
        ml_decode(y, self.0)
    }
}

/// Largest block length for exhaustive enumeration of received words.
pub const MAX_ENUMERATION_N: usize = 20;

/// A decoder evaluated once on every possible received word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupDecoder {
    n: usize,
    table: Vec<u32>,
}

impl LookupDecoder {
    pub fn tabulate<D: BlockDecoder + ?Sized>(decoder: &D) -> Result<Self> {
        let n = decoder.n();
        if n > MAX_ENUMERATION_N {
            return Err(Error::arg("block too long to tabulate"));
        }
        let table = (0..1u64 << n)
            .map(|mask| decoder.decode(&Word::from_mask(mask, n)) as u32)
            .collect();
        Ok(LookupDecoder { n, table })
    }
}

impl BlockDecoder for LookupDecoder {
    fn n(&self) -> usize {
        self.n
    }

    fn decode(&self, y: &Word) -> usize {
        self.table[y.to_mask() as usize] as usize
    }
}

/// Runs a decoder trained on `learned` against words of an equivalent
/// `reference` code. With `learned ⊙ t` permuted by `perm` equal to
/// `reference` as a set, a received reference word `y` is mapped to
/// `perm⁻¹(y) ⊙ t` before decoding and the decision is relabelled back.
/// The map is an isometry, so channel statistics are unchanged.
#[derive(Debug, Clone)]
pub struct AlignedDecoder<D> {
    inner: D,
    translation: Word,
    permutation: Vec<usize>,
    labels: Vec<usize>,
}

impl<D: BlockDecoder> AlignedDecoder<D> {
    pub fn new(
        inner: D,
        learned: &Codebook,
        reference: &Codebook,
        translation: &Word,
        permutation: &[usize],
    ) -> Result<Self> {
        let n = learned.n();
        if reference.n() != n || reference.size() != learned.size() {
            return Err(Error::dim("AlignedDecoder::new", learned.size(), reference.size()));
        }
        if translation.len() != n || permutation.len() != n || inner.n() != n {
            return Err(Error::dim("AlignedDecoder::new", n, permutation.len()));
        }
        let mut seen = alloc::vec![false; n];
        for &p in permutation {
            if p >= n || core::mem::replace(&mut seen[p], true) {
                return Err(Error::arg("not a permutation"));
            }
        }
        let mut labels = alloc::vec![usize::MAX; learned.size()];
        let mut used = alloc::vec![false; reference.size()];
        for (j, x) in learned.words().iter().enumerate() {
            let image = x.product(translation)?.permute(permutation);
            let m = reference
                .words()
                .iter()
                .position(|h| *h == image)
                .ok_or_else(|| Error::arg("codebooks are not equivalent under the given map"))?;
            if core::mem::replace(&mut used[m], true) {
                return Err(Error::arg("alignment is not one-to-one"));
            }
            labels[j] = m;
        }
        Ok(AlignedDecoder {
            inner,
            translation: translation.clone(),
            permutation: permutation.to_vec(),
            labels,
        })
    }
}

impl<D: BlockDecoder> BlockDecoder for AlignedDecoder<D> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn decode(&self, y: &Word) -> usize {
        let mut back = alloc::vec![0i8; y.len()];
        for (i, &p) in self.permutation.iter().enumerate() {
            back[p] = y.symbols()[i];
        }
        let mapped = Word::new(back)
            .expect("permuted symbols stay binary")
            .product(&self.translation)
            .expect("lengths checked at construction");
        self.labels[self.inner.decode(&mapped)]
    }
}

/// The four encoder/decoder pairings compared in the BLER study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pairing {
    HammingMl,
    HammingAeDec,
    AeMl,
    AeAeDec,
}

impl Pairing {
    pub const ALL: [Pairing; 4] = [
        Pairing::HammingMl,
        Pairing::HammingAeDec,
        Pairing::AeMl,
        Pairing::AeAeDec,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Pairing::HammingMl => "hamming-ml",
            Pairing::HammingAeDec => "hamming-aedec",
            Pairing::AeMl => "ae-ml",
            Pairing::AeAeDec => "ae-aedec",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Pairing::ALL.into_iter().find(|p| p.tag() == tag)
    }

    /// Whether the pairing needs a trained model.
    pub fn needs_model(self) -> bool {
        self != Pairing::HammingMl
    }

    fn stream_index(self) -> u64 {
        self as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub p_grid: Vec<f64>,
    pub trials_per_p: u64,
    pub seed: u64,
    pub pairing: Pairing,
}

impl EvalConfig {
    pub fn new(pairing: Pairing, trials_per_p: u64, seed: u64) -> Self {
        EvalConfig {
            p_grid: default_grid(),
            trials_per_p,
            seed,
            pairing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials_per_p == 0 {
            return Err(Error::Config("trials_per_p must be positive".into()));
        }
        if self.p_grid.is_empty() || self.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("p_grid must be non-empty and inside [0, 1]".into()));
        }
        Ok(())
    }
}

/// `0.01, 0.02, …, 0.10`.
pub fn default_grid() -> Vec<f64> {
    grid(0.01, 0.1, 0.01).expect("static grid")
}

/// Inclusive arithmetic grid, values rounded to 12 decimals.
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::arg("grid needs lo <= hi and step > 0"));
    }
    let count = libm::floor((hi - lo) / step + 1e-9) as usize + 1;
    Ok((0..count)
        .map(|i| libm::round((lo + i as f64 * step) * 1e12) / 1e12)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerPoint {
    pub p: f64,
    pub bler: f64,
    pub standard_error: f64,
    pub trials: u64,
    pub errors: u64,
}

impl BlerPoint {
    pub fn from_counts(p: f64, errors: u64, trials: u64) -> Self {
        let bler = errors as f64 / trials as f64;
        BlerPoint {
            p,
            bler,
            standard_error: libm::sqrt(bler * (1.0 - bler) / trials as f64),
            trials,
            errors,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlerCurve {
    pub points: Vec<BlerPoint>,
}

fn check_pair<E, D>(encoder: &E, decoder: &D) -> Result<()>
where
    E: BlockEncoder + ?Sized,
    D: BlockDecoder + ?Sized,
{
    if encoder.n() != decoder.n() {
        return Err(Error::dim("run_bler", encoder.n(), decoder.n()));
    }
    Ok(())
}

/// Monte Carlo estimate at one crossover probability: uniform messages,
/// encode, BSC, decode, count `m̂ ≠ m`.
pub fn run_bler_point<E, D>(encoder: &E, decoder: &D, p: f64, trials: u64, rng: &mut Rng) -> Result<BlerPoint>
where
    E: BlockEncoder + ?Sized,
    D: BlockDecoder + ?Sized,
{
    check_pair(encoder, decoder)?;
    if trials == 0 {
        return Err(Error::arg("trials must be positive"));
    }
    let channel = BscParams::new(p)?;
    let messages = 1usize << encoder.k();
    let mut errors = 0u64;
    for _ in 0..trials {
        let m = rng.below(messages);
        let y = bsc_apply(encoder.encode(m), channel, rng);
        if decoder.decode(&y) != m {
            errors += 1;
        }
    }
    Ok(BlerPoint::from_counts(p, errors, trials))
}

/// Random stream of grid point `index` for a pairing; independent across
/// points and pairings, so points can be evaluated in any order.
pub fn point_rng(seed: u64, pairing: Pairing, index: usize) -> Rng {
    Rng::with_substream(seed, Stream::Eval, pairing.stream_index() << 32 | index as u64)
}

pub fn run_bler<E, D>(cfg: &EvalConfig, encoder: &E, decoder: &D) -> Result<BlerCurve>
where
    E: BlockEncoder + ?Sized,
    D: BlockDecoder + ?Sized,
{
    cfg.validate()?;
    check_pair(encoder, decoder)?;
    let points = cfg
        .p_grid
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            run_bler_point(encoder, decoder, p, cfg.trials_per_p, &mut point_rng(cfg.seed, cfg.pairing, i))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlerCurve { points })
}

/// Exact BLER by enumerating all `2^n` received words.
pub fn exact_bler<E, D>(encoder: &E, decoder: &D, p: f64) -> Result<f64>
where
    E: BlockEncoder + ?Sized,
    D: BlockDecoder + ?Sized,
{
    check_pair(encoder, decoder)?;
    BscParams::new(p)?;
    let n = encoder.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::arg("block too long to enumerate"));
    }
    let messages = 1usize << encoder.k();
    let masks: Vec<u64> = (0..messages).map(|m| encoder.encode(m).to_mask()).collect();
    let mut weight_prob = alloc::vec![0.0; n + 1];
    for (d, w) in weight_prob.iter_mut().enumerate() {
        *w = libm::pow(p, d as f64) * libm::pow(1.0 - p, (n - d) as f64);
    }
    let mut bler = 0.0;
    for y in 0..1u64 << n {
        let decided = decoder.decode(&Word::from_mask(y, n));
        for (m, &x) in masks.iter().enumerate() {
            if m != decided {
                bler += weight_prob[(x ^ y).count_ones() as usize];
            }
        }
    }
    Ok(bler / messages as f64)
}

/// Per-point z-scores `(a − b) / sqrt(se_a² + se_b²)` and summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveComparison {
    pub p: Vec<f64>,
    pub z: Vec<f64>,
    pub max_abs_z: f64,
    /// Largest `a.bler / b.bler` over points with `b.bler > 0`.
    pub max_ratio: f64,
    /// Any `|z| > 4`.
    pub flagged: bool,
}

pub const Z_FLAG: f64 = 4.0;

pub fn compare_curves(a: &BlerCurve, b: &BlerCurve) -> Result<CurveComparison> {
    if a.points.len() != b.points.len() {
        return Err(Error::dim("compare_curves", a.points.len(), b.points.len()));
    }
    let mut z = Vec::with_capacity(a.points.len());
    let mut max_ratio = 0.0f64;
    for (pa, pb) in a.points.iter().zip(&b.points) {
        if (pa.p - pb.p).abs() > 1e-12 {
            return Err(Error::arg("curves are on different p grids"));
        }
        let se = libm::sqrt(pa.standard_error * pa.standard_error + pb.standard_error * pb.standard_error);
        let diff = pa.bler - pb.bler;
        z.push(if diff == 0.0 {
            0.0
        } else if se == 0.0 {
            f64::INFINITY.copysign(diff)
        } else {
            diff / se
        });
        if pb.bler > 0.0 {
            max_ratio = max_ratio.max(pa.bler / pb.bler);
        }
    }
    let max_abs_z = z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(CurveComparison {
        p: a.points.iter().map(|pt| pt.p).collect(),
        z,
        max_abs_z,
        max_ratio,
        flagged: max_abs_z > Z_FLAG,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classic::{exact_bler_perfect74, hamming74_codebook, uncoded_bler};

    /// Sends the raw `n` bits of the message id; decodes by reading them back.
    struct Uncoded {
        words: Vec<Word>,
    }

    impl Uncoded {
        fn new(n: usize) -> Self {
            Uncoded {
                words: (0..1u64 << n).map(|m| Word::from_mask(m, n)).collect(),
            }
        }
    }

    impl BlockEncoder for Uncoded {
        fn k(&self) -> usize {
            self.words[0].len()
        }
        fn n(&self) -> usize {
            self.words[0].len()
        }
        fn encode(&self, message: usize) -> &Word {
            &self.words[message]
        }
    }

    impl BlockDecoder for Uncoded {
        fn n(&self) -> usize {
            self.words[0].len()
        }
        fn decode(&self, y: &Word) -> usize {
            y.to_mask() as usize
        }
    }

    #[test]
    fn grid_values() {
        let g = default_grid();
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[5], 0.06);
        assert_eq!(g[9], 0.1);
        assert!(grid(0.1, 0.0, 0.01).is_err());
    }

    #[test]
    fn hamming_ml_matches_closed_form_at_005() {
        let cb = hamming74_codebook();
        let cfg = EvalConfig {
            p_grid: alloc::vec![0.05],
            ..EvalConfig::new(Pairing::HammingMl, 1_000_000, 17)
        };
        let curve = run_bler(&cfg, &cb, &MlDecoder(&cb)).unwrap();
        let pt = curve.points[0];
        let exact = exact_bler_perfect74(0.05).unwrap();
        assert!((pt.standard_error - 2.06e-4).abs() < 5e-6);
        assert!((pt.bler - exact).abs() < 3.0 * pt.standard_error, "{pt:?}");
    }

    #[test]
    fn zero_noise_gives_zero_bler() {
        let cb = hamming74_codebook();
        let mut rng = Rng::new(1, Stream::Eval);
        let pt = run_bler_point(&cb, &MlDecoder(&cb), 0.0, 10_000, &mut rng).unwrap();
        assert_eq!(pt.errors, 0);
        assert_eq!(pt.standard_error, 0.0);
    }

    #[test]
    fn exact_enumeration_matches_closed_form() {
        let cb = hamming74_codebook();
        for &p in &[0.01, 0.05, 0.1] {
            let e = exact_bler(&cb, &MlDecoder(&cb), p).unwrap();
            assert!((e - exact_bler_perfect74(p).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn lookup_table_is_transparent() {
        let cb = hamming74_codebook();
        let table = LookupDecoder::tabulate(&MlDecoder(&cb)).unwrap();
        for y in 0..128 {
            let w = Word::from_mask(y, 7);
            assert_eq!(table.decode(&w), ml_decode(&w, &cb));
        }
    }

    #[test]
    fn seeded_curves_are_identical() {
        let cb = hamming74_codebook();
        let cfg = EvalConfig::new(Pairing::HammingMl, 5_000, 4);
        let a = run_bler(&cfg, &cb, &MlDecoder(&cb)).unwrap();
        let b = run_bler(&cfg, &cb, &MlDecoder(&cb)).unwrap();
        assert_eq!(a, b);
        let self_cmp = compare_curves(&a, &a).unwrap();
        assert!(self_cmp.z.iter().all(|&z| z == 0.0));
        assert!(!self_cmp.flagged);
    }

    #[test]
    fn independent_runs_agree() {
        let cb = hamming74_codebook();
        let a = run_bler(&EvalConfig::new(Pairing::HammingMl, 50_000, 1), &cb, &MlDecoder(&cb)).unwrap();
        let b = run_bler(&EvalConfig::new(Pairing::HammingMl, 50_000, 2), &cb, &MlDecoder(&cb)).unwrap();
        assert!(!compare_curves(&a, &b).unwrap().flagged);
    }

    #[test]
    fn uncoded_is_clearly_worse() {
        let cb = hamming74_codebook();
        let raw = Uncoded::new(7);
        let cfg = EvalConfig::new(Pairing::HammingMl, 50_000, 9);
        let coded = run_bler(&cfg, &cb, &MlDecoder(&cb)).unwrap();
        let uncoded = run_bler(&cfg, &raw, &raw).unwrap();
        for pt in &uncoded.points {
            let exact = uncoded_bler(pt.p, 7).unwrap();
            assert!((pt.bler - exact).abs() < 4.0 * pt.standard_error);
        }
        let cmp = compare_curves(&uncoded, &coded).unwrap();
        assert!(cmp.z.iter().all(|&z| z > 10.0), "{:?}", cmp.z);
    }

    #[test]
    fn grid_mismatch() {
        let a = BlerCurve {
            points: alloc::vec![BlerPoint::from_counts(0.01, 1, 10)],
        };
        let b = BlerCurve {
            points: alloc::vec![BlerPoint::from_counts(0.02, 1, 10)],
        };
        assert!(compare_curves(&a, &b).is_err());
    }

    #[test]
    fn aligned_decoder_on_permuted_coset() {
        let h = hamming74_codebook();
        let t = Word::from_mask(0b0101100, 7);
        let perm = [3, 0, 6, 1, 5, 2, 4];
        // learned = coset of a permuted Hamming code, messages shuffled
        let mut words: Vec<Word> = h
            .words()
            .iter()
            .map(|w| {
                let mut inv = alloc::vec![0i8; 7];
                for (i, &p) in perm.iter().enumerate() {
                    inv[p] = w.symbols()[i];
                }
                Word::new(inv).unwrap().product(&t).unwrap()
            })
            .collect();
        words.rotate_left(5);
        let learned = Codebook::new(4, 7, words).unwrap();
        let translation = learned.word(0).clone();
        // translation by any member maps back into the linear code, so
        // search the permutation with the learned ML decoder
        let aligned = AlignedDecoder::new(MlDecoder(&learned), &learned, &h, &translation, &perm).unwrap();
        for m in 0..16 {
            for e in 0..7 {
                let y = h.word(m).product(&Word::from_mask(1 << e, 7)).unwrap();
                assert_eq!(aligned.decode(&y), m);
            }
        }
        assert!(AlignedDecoder::new(MlDecoder(&learned), &learned, &h, &translation, &[0, 1, 2, 3, 4, 5, 6]).is_err());
    }
}
