//! Hamming(7,4) reference code, exhaustive ML decoding and the closed-form
//! block error rate of a perfect single-error-correcting code.

use alloc::vec::Vec;

use crate::channel::{bits_to_word, Word};
use crate::{Error, Result};

/// An ordered list of `2^k` words; index = message id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    k: usize,
    n: usize,
    words: Vec<Word>,
}

impl Codebook {
    pub fn new(k: usize, n: usize, words: Vec<Word>) -> Result<Self> {
        if k > 30 {
            return Err(Error::arg("k too large"));
        }
        if words.len() != 1 << k {
            return Err(Error::dim("Codebook::new", 1 << k, words.len()));
        }
        if let Some(bad) = words.iter().find(|w| w.len() != n) {
            return Err(Error::dim("Codebook::new", n, bad.len()));
        }
        Ok(Codebook { k, n, words })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of messages, `2^k`.
    #[inline]
    pub fn size(&self) -> usize {
        self.words.len()
    }

    #[inline]
    pub fn word(&self, message: usize) -> &Word {
        &self.words[message]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Count of distinct words.
    pub fn distinct(&self) -> usize {
        let mut sorted = self.words.clone();
        sorted.sort();
        sorted.dedup();
        sorted.len()
    }

    /// Multiply every word by `t` (a coset shift).
    pub fn translate(&self, t: &Word) -> Result<Codebook> {
        let words = self
            .words
            .iter()
            .map(|w| w.product(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Codebook { words, ..*self })
    }

    /// Apply the coordinate permutation `out[i] = w[perm[i]]` to every word.
    pub fn permute(&self, perm: &[usize]) -> Codebook {
        Codebook {
            words: self.words.iter().map(|w| w.permute(perm)).collect(),
            ..*self
        }
    }
}

/// Binary `k × n` generator matrix in systematic form `[I_k | P]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    k: usize,
    n: usize,
    rows: Vec<Vec<u8>>,
}

impl GeneratorMatrix {
    /// Builds `[I_k | P]` from the parity part `P` (`k` rows of equal length).
    pub fn systematic(parity: &[&[u8]]) -> Result<Self> {
        let k = parity.len();
        let r = parity.first().map_or(0, |p| p.len());
        let mut rows = Vec::with_capacity(k);
        for (i, p) in parity.iter().enumerate() {
            if p.len() != r {
                return Err(Error::dim("GeneratorMatrix::systematic", r, p.len()));
            }
            if p.iter().any(|&b| b > 1) {
                return Err(Error::arg("generator entries must be 0 or 1"));
            }
            let mut row = alloc::vec![0u8; k];
            row[i] = 1;
            row.extend_from_slice(p);
            rows.push(row);
        }
        Ok(GeneratorMatrix { k, n: k + r, rows })
    }

    pub fn hamming74() -> Self {
        Self::systematic(&[&[1, 1, 0], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]])
            .expect("fixed parity block is well formed")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// `bits · G` over GF(2).
    pub fn encode_bits(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.k {
            return Err(Error::dim("GeneratorMatrix::encode_bits", self.k, bits.len()));
        }
        let mut out = alloc::vec![0u8; self.n];
        for (&b, row) in bits.iter().zip(&self.rows) {
            if b == 1 {
                for (o, &g) in out.iter_mut().zip(row) {
                    *o ^= g;
                }
            }
        }
        Ok(out)
    }

    /// Codebook in message order; message `m` carries bit `i = (m >> (k-1-i)) & 1`.
    pub fn codebook(&self) -> Codebook {
        let words = (0..1usize << self.k)
            .map(|m| {
                let bits = message_bits(m, self.k);
                let code = self.encode_bits(&bits).expect("k bits");
                bits_to_word(&code).expect("binary codeword")
            })
            .collect();
        Codebook {
            k: self.k,
            n: self.n,
            words,
        }
    }
}

/// The `k` information bits of message `m`, most significant first.
pub fn message_bits(m: usize, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((m >> (k - 1 - i)) & 1) as u8).collect()
}

pub fn hamming74_codebook() -> Codebook {
    GeneratorMatrix::hamming74().codebook()
}

pub fn hamming_distance(a: &Word, b: &Word) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::dim("hamming_distance", a.len(), b.len()));
    }
    Ok(a.symbols()
        .iter()
        .zip(b.symbols())
        .filter(|(x, y)| x != y)
        .count())
}

#[inline]
fn distance_unchecked(a: &Word, b: &Word) -> usize {
    a.symbols()
        .iter()
        .zip(b.symbols())
        .filter(|(x, y)| x != y)
        .count()
}

/// Minimum-distance decision; ties go to the lowest message index.
/// `y` must have length `cb.n()`.
pub fn ml_decode(y: &Word, cb: &Codebook) -> usize {
    debug_assert_eq!(y.len(), cb.n());
    let mut best = 0;
    let mut best_d = usize::MAX;
    for (m, w) in cb.words.iter().enumerate() {
        let d = distance_unchecked(y, w);
        if d < best_d {
            best_d = d;
            best = m;
        }
    }
    best
}

/// Every message attaining the minimum distance to `y`, in index order.
pub fn ml_candidates(y: &Word, cb: &Codebook) -> (usize, Vec<usize>) {
    let dists: Vec<usize> = cb.words.iter().map(|w| distance_unchecked(y, w)).collect();
    let min = dists.iter().copied().min().unwrap_or(0);
    let set = dists
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == min)
        .map(|(m, _)| m)
        .collect();
    (min, set)
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg("crossover probability must lie in [0, 1]"));
    }
    Ok(())
}

/// Exact BLER of Hamming(7,4) under ML decoding: every pattern of weight
/// at most one is corrected and nothing else is.
pub fn exact_bler_perfect74(p: f64) -> Result<f64> {
    check_probability(p)?;
    let q = 1.0 - p;
    Ok(1.0 - libm::pow(q, 7.0) - 7.0 * p * libm::pow(q, 6.0))
}

/// Exact BLER of sending `n` raw bits with no coding.
pub fn uncoded_bler(p: f64, n: usize) -> Result<f64> {
    check_probability(p)?;
    Ok(1.0 - libm::pow(1.0 - p, n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bsc_apply, word_to_bits, BscParams};
    use crate::numerics::{Rng, Stream};

    #[test]
    fn message_zero_is_all_plus() {
        let cb = hamming74_codebook();
        assert_eq!(cb.size(), 16);
        assert_eq!(cb.word(0), &Word::ones(7));
    }

    #[test]
    fn systematic_prefix() {
        let cb = hamming74_codebook();
        for m in 0..16 {
            assert_eq!(&word_to_bits(cb.word(m))[..4], &message_bits(m, 4)[..]);
        }
        assert_eq!(GeneratorMatrix::hamming74().rows()[0], [1, 0, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn weight_distribution_and_distance() {
        let cb = hamming74_codebook();
        let mut weights = [0usize; 8];
        for w in cb.words() {
            weights[word_to_bits(w).iter().filter(|&&b| b == 1).count()] += 1;
        }
        assert_eq!(weights, [1, 0, 0, 7, 7, 0, 0, 1]);
        for i in 0..16 {
            for j in 0..16 {
                if i != j {
                    assert!(hamming_distance(cb.word(i), cb.word(j)).unwrap() >= 3);
                }
            }
        }
    }

    #[test]
    fn closed_under_xor() {
        let cb = hamming74_codebook();
        for a in cb.words() {
            for b in cb.words() {
                assert!(cb.words().contains(&a.product(b).unwrap()));
            }
        }
    }

    #[test]
    fn distance_cases() {
        let mut rng = Rng::new(4, Stream::Data);
        let a = Word::from_mask(0b1011001, 7);
        assert_eq!(hamming_distance(&a, &a).unwrap(), 0);
        assert_eq!(hamming_distance(&a, &a.negate()).unwrap(), 7);
        assert!(hamming_distance(&a, &Word::ones(6)).is_err());
        for _ in 0..200 {
            let x = rng.below(128) as u64;
            let y = rng.below(128) as u64;
            let d = hamming_distance(&Word::from_mask(x, 7), &Word::from_mask(y, 7)).unwrap();
            assert_eq!(d, (x ^ y).count_ones() as usize);
        }
    }

    #[test]
    fn ml_corrects_every_single_error() {
        let cb = hamming74_codebook();
        assert_eq!(ml_decode(cb.word(5), &cb), 5);
        for m in 0..16 {
            for pos in 0..7 {
                let y = cb.word(m).product(&Word::from_mask(1 << pos, 7)).unwrap();
                assert_eq!(ml_decode(&y, &cb), m);
            }
        }
    }

    #[test]
    fn ml_ties_lowest_index() {
        // Two codewords at distance 2 from each other: the midpoint word is
        // equidistant from both.
        let words = [0b0000000u64, 0b0000011, 0b1111100, 0b1111111]
            .iter()
            .map(|&m| Word::from_mask(m, 7))
            .collect();
        let cb = Codebook::new(2, 7, words).unwrap();
        let y = Word::from_mask(0b0000001, 7);
        let (d, set) = ml_candidates(&y, &cb);
        assert_eq!((d, set.clone()), (1, alloc::vec![0, 1]));
        assert_eq!(ml_decode(&y, &cb), set[0]);
    }

    #[test]
    fn zero_noise_identity() {
        let cb = hamming74_codebook();
        let mut rng = Rng::new(0, Stream::Channel);
        let clean = BscParams::new(0.0).unwrap();
        for m in 0..16 {
            assert_eq!(ml_decode(&bsc_apply(cb.word(m), clean, &mut rng), &cb), m);
        }
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(exact_bler_perfect74(0.0).unwrap(), 0.0);
        // 1 - 0.99^7 - 7*0.01*0.99^6 = 1 - 0.9320653479 - 0.0659036104
        let v = exact_bler_perfect74(0.01).unwrap();
        assert!((v - 0.002_031_041_6).abs() < 1e-10, "{v}");
        let v = exact_bler_perfect74(0.1).unwrap();
        assert!((v - 0.149_694_4).abs() < 1e-7, "{v}");
        let v = exact_bler_perfect74(0.05).unwrap();
        assert!((v - 0.044_381).abs() < 1e-6, "{v}");
        assert!(exact_bler_perfect74(-0.1).is_err());
    }

    #[test]
    fn closed_form_matches_enumeration() {
        let cb = hamming74_codebook();
        for &p in &[0.01, 0.05, 0.1, 0.3] {
            let mut bler = 0.0;
            for m in 0..16 {
                for e in 0u64..128 {
                    let w = e.count_ones() as i32;
                    let prob = libm::pow(p, w as f64) * libm::pow(1.0 - p, (7 - w) as f64);
                    let y = cb.word(m).product(&Word::from_mask(e, 7)).unwrap();
                    if ml_decode(&y, &cb) != m {
                        bler += prob / 16.0;
                    }
                }
            }
            assert!((bler - exact_bler_perfect74(p).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn codebook_validation() {
        assert!(Codebook::new(2, 7, alloc::vec![Word::ones(7); 3]).is_err());
        assert!(Codebook::new(1, 7, alloc::vec![Word::ones(7), Word::ones(6)]).is_err());
    }
}
