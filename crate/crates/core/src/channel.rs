//! Binary symmetric channel over the antipodal alphabet `{-1, +1}`.
//!
//! Bits map to symbols as `0 -> +1`, `1 -> -1`, so XOR of bit vectors is the
//! elementwise product of words and a channel flip is a product with `-1`.

use alloc::vec::Vec;
use core::fmt;

use crate::numerics::Rng;
use crate::{Error, Result};

/// A length-`n` word over `{-1, +1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<i8>);

impl Word {
    pub fn new(symbols: Vec<i8>) -> Result<Self> {
        if symbols.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::arg("word symbols must be -1 or +1"));
        }
        Ok(Word(symbols))
    }

    pub fn ones(n: usize) -> Self {
        Word(alloc::vec![1; n])
    }

    /// Word whose bit `i` (symbol `-1`) is set in `mask`, `i < n`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Word((0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    /// Inverse of [`Word::from_mask`]; requires `n <= 64`.
    pub fn to_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn symbols(&self) -> &[i8] {
        &self.0
    }

    /// Elementwise product (XOR in the bit domain).
    pub fn product(&self, other: &Word) -> Result<Word> {
        if self.len() != other.len() {
            return Err(Error::dim("Word::product", self.len(), other.len()));
        }
        Ok(Word(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect()))
    }

    pub fn negate(&self) -> Word {
        Word(self.0.iter().map(|s| -s).collect())
    }

    /// Squared Euclidean norm; equals `n` for every valid word.
    pub fn energy(&self) -> usize {
        self.0.iter().map(|&s| (s as i32 * s as i32) as usize).sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| s as f64).collect()
    }

    /// `out[i] = self[perm[i]]`.
    pub fn permute(&self, perm: &[usize]) -> Word {
        Word(perm.iter().map(|&p| self.0[p]).collect())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Word(")?;
        for s in &self.0 {
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        f.write_str(")")
    }
}

/// Crossover probability of a BSC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BscParams {
    p: f64,
}

impl BscParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::arg("crossover probability must lie in [0, 1]"));
        }
        Ok(BscParams { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// `y = x ⊙ z` with each `z_i = -1` independently with probability `p`.
pub fn bsc_apply(x: &Word, params: BscParams, rng: &mut Rng) -> Word {
    Word(
        x.0.iter()
            .map(|&s| if rng.bernoulli(params.p) { -s } else { s })
            .collect(),
    )
}

/// Componentwise sign with `sign(0) = +1`.
pub fn binarize(values: &[f64]) -> Result<Word> {
    values
        .iter()
        .map(|&v| {
            if v.is_nan() {
                Err(Error::arg("cannot binarize NaN"))
            } else if v < 0.0 {
                Ok(-1)
            } else {
                Ok(1)
            }
        })
        .collect::<Result<Vec<i8>>>()
        .map(Word)
}

/// One crossover probability drawn uniformly from `[p_lo, p_hi]` for the whole
/// batch, then an independent flip mask per sample at that probability.
pub fn sample_mask_batch(
    batch: usize,
    n: usize,
    p_lo: f64,
    p_hi: f64,
    rng: &mut Rng,
) -> Result<Vec<Word>> {
    if !(0.0 <= p_lo && p_lo <= p_hi && p_hi <= 1.0) {
        return Err(Error::arg("mask range must satisfy 0 <= p_lo <= p_hi <= 1"));
    }
    let params = BscParams::new(rng.uniform(p_lo, p_hi)?)?;
    let ones = Word::ones(n);
    Ok((0..batch).map(|_| bsc_apply(&ones, params, rng)).collect())
}

pub fn bits_to_word(bits: &[u8]) -> Result<Word> {
    bits.iter()
        .map(|&b| match b {
            0 => Ok(1),
            1 => Ok(-1),
            _ => Err(Error::arg("bits must be 0 or 1")),
        })
        .collect::<Result<Vec<i8>>>()
        .map(Word)
}

pub fn word_to_bits(word: &Word) -> Vec<u8> {
    word.0.iter().map(|&s| u8::from(s < 0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Stream;
    use alloc::vec;

    #[test]
    fn rejects_bad_symbols() {
        assert!(Word::new(vec![1, 0, -1]).is_err());
        assert!(BscParams::new(1.5).is_err());
    }

    #[test]
    fn bsc_extremes() {
        let mut rng = Rng::new(1, Stream::Channel);
        let x = Word::new(vec![1, -1, -1, 1, 1, -1, 1]).unwrap();
        assert_eq!(bsc_apply(&x, BscParams::new(0.0).unwrap(), &mut rng), x);
        assert_eq!(bsc_apply(&x, BscParams::new(1.0).unwrap(), &mut rng), x.negate());
        let zero = BscParams::new(0.0).unwrap();
        let twice = bsc_apply(&bsc_apply(&x, zero, &mut rng), zero, &mut rng);
        assert_eq!(twice, x);
    }

    #[test]
    fn bsc_flip_fraction() {
        let mut rng = Rng::new(77, Stream::Channel);
        let x = Word::ones(1000);
        let params = BscParams::new(0.1).unwrap();
        let mut flips = 0usize;
        for _ in 0..1000 {
            flips += bsc_apply(&x, params, &mut rng)
                .symbols()
                .iter()
                .filter(|&&s| s < 0)
                .count();
        }
        assert!((flips as f64 / 1e6 - 0.1).abs() < 0.001);
    }

    #[test]
    fn binarize_convention() {
        let w = binarize(&[0.3, -0.2, 0.0]).unwrap();
        assert_eq!(w.symbols(), &[1, -1, 1]);
        let w = binarize(&[1.0, -1.0, -1.0]).unwrap();
        assert_eq!(w.symbols(), &[1, -1, -1]);
        assert!(binarize(&[0.1, f64::NAN]).is_err());
        // sign(-0.0) is +1 as well
        assert_eq!(binarize(&[-0.0]).unwrap().symbols(), &[1]);
    }

    #[test]
    fn mask_batches() {
        let mut rng = Rng::new(5, Stream::Mask);
        let masks = sample_mask_batch(10, 7, 0.0, 0.0, &mut rng).unwrap();
        assert!(masks.iter().all(|m| *m == Word::ones(7)));
        assert!(sample_mask_batch(10, 7, 0.2, 0.1, &mut rng).is_err());
        assert!(sample_mask_batch(10, 7, -0.1, 0.1, &mut rng).is_err());

        let mut flips = 0usize;
        let batches = 20_000;
        for _ in 0..batches {
            for m in sample_mask_batch(10, 7, 0.06, 0.1, &mut rng).unwrap() {
                flips += m.symbols().iter().filter(|&&s| s < 0).count();
            }
        }
        let rate = flips as f64 / (batches * 70) as f64;
        assert!((rate - 0.08).abs() < 0.001, "rate {rate}");
    }

    #[test]
    fn bit_mapping() {
        assert_eq!(bits_to_word(&[0; 7]).unwrap(), Word::ones(7));
        assert!(bits_to_word(&[0, 2]).is_err());
        let mut rng = Rng::new(3, Stream::Data);
        for _ in 0..100 {
            let bits: Vec<u8> = (0..7).map(|_| rng.below(2) as u8).collect();
            assert_eq!(word_to_bits(&bits_to_word(&bits).unwrap()), bits);
        }
    }

    #[test]
    fn xor_is_product_exhaustive() {
        for n in 1..=7usize {
            for a in 0u64..1 << n {
                for b in 0u64..1 << n {
                    let bits = |m: u64| (0..n).map(|i| (m >> i & 1) as u8).collect::<Vec<_>>();
                    let wa = bits_to_word(&bits(a)).unwrap();
                    let wb = bits_to_word(&bits(b)).unwrap();
                    let wx = bits_to_word(&bits(a ^ b)).unwrap();
                    assert_eq!(wa.product(&wb).unwrap(), wx);
                }
            }
        }
    }

    #[test]
    fn mask_round_trip() {
        for m in 0u64..128 {
            assert_eq!(Word::from_mask(m, 7).to_mask(), m);
        }
    }
}
