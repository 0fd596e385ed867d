//! Algebraic structure of a codebook: distance spectrum, linearity after
//! translation, equivalence to Hamming(7,4), and decoder agreement with ML.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::Word;
use crate::classic::{hamming74_codebook, ml_candidates, Codebook};
use crate::eval::{BlockDecoder, MAX_ENUMERATION_N};
use crate::{Error, Result};

/// `counts[d]` is the number of codewords at distance `d` from a codeword,
/// averaged over all codewords. Sums to `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpectrum {
    pub counts: Vec<f64>,
}

impl DistanceSpectrum {
    /// Counts as integers, when every entry is integral (always so for
    /// linear and coset codes).
    pub fn integral(&self) -> Option<Vec<u64>> {
        self.counts
            .iter()
            .map(|&c| (c == libm::trunc(c)).then_some(c as u64))
            .collect()
    }
}

pub fn distance_spectrum(cb: &Codebook) -> DistanceSpectrum {
    let masks: Vec<u64> = cb.words().iter().map(Word::to_mask).collect();
    let mut totals = vec![0u64; cb.n() + 1];
    for &a in &masks {
        for &b in &masks {
            totals[(a ^ b).count_ones() as usize] += 1;
        }
    }
    let m = masks.len() as f64;
    DistanceSpectrum {
        counts: totals.into_iter().map(|t| t as f64 / m).collect(),
    }
}

/// Distance profile seen from a single codeword.
pub fn distance_profile(cb: &Codebook, anchor: usize) -> Vec<u64> {
    let a = cb.word(anchor).to_mask();
    let mut counts = vec![0u64; cb.n() + 1];
    for w in cb.words() {
        counts[(a ^ w.to_mask()).count_ones() as usize] += 1;
    }
    counts
}

/// Minimum distance over distinct index pairs; 0 means duplicate words.
pub fn min_distance(cb: &Codebook) -> Result<usize> {
    if cb.size() < 2 {
        return Err(Error::arg("minimum distance needs at least two codewords"));
    }
    let masks: Vec<u64> = cb.words().iter().map(Word::to_mask).collect();
    let mut best = usize::MAX;
    for i in 0..masks.len() {
        for j in i + 1..masks.len() {
            best = best.min((masks[i] ^ masks[j]).count_ones() as usize);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearity {
    pub linear: bool,
    /// The codeword used as the translation (`words[0]`).
    pub translation: Word,
    pub duplicates: bool,
}

/// Translates by `words[0]` so that word becomes all-`+1`, then checks
/// closure under elementwise product over all pairs.
pub fn check_linearity(cb: &Codebook) -> Linearity {
    let translation = cb.word(0).clone();
    let duplicates = cb.distinct() != cb.size();
    let masks: Vec<u64> = {
        let mut m: Vec<u64> = cb
            .words()
            .iter()
            .map(|w| w.to_mask() ^ translation.to_mask())
            .collect();
        m.sort_unstable();
        m
    };
    let linear = !duplicates
        && masks.binary_search(&0).is_ok()
        && masks
            .iter()
            .all(|&a| masks.iter().all(|&b| masks.binary_search(&(a ^ b)).is_ok()));
    Linearity {
        linear,
        translation,
        duplicates,
    }
}

/// Next permutation in lexicographic order; `false` after the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equivalence {
    pub equivalent: bool,
    pub translation: Word,
    /// `out[i] = w[permutation[i]]` maps the translated code onto Hamming(7,4).
    pub permutation: Option<Vec<usize>>,
    /// The identity permutation already works: a pure coset.
    pub pure_coset: bool,
}

/// Searches all `7!` coordinate permutations, in lexicographic order, for one
/// mapping the codebook translated by `words[0]` onto the pinned Hamming(7,4)
/// code as a set.
pub fn hamming_equivalence(cb: &Codebook) -> Result<Equivalence> {
    if cb.k() != 4 || cb.n() != 7 {
        return Err(Error::arg("Hamming(7,4) equivalence needs k = 4, n = 7"));
    }
    let reference = hamming74_codebook();
    let mut target: Vec<u64> = reference.words().iter().map(Word::to_mask).collect();
    target.sort_unstable();
    let translation = cb.word(0).clone();
    let t = translation.to_mask();
    let shifted: Vec<u64> = cb.words().iter().map(|w| w.to_mask() ^ t).collect();

    let mut perm: Vec<usize> = (0..7).collect();
    let mut candidate = vec![0u64; shifted.len()];
    loop {
        for (c, &w) in candidate.iter_mut().zip(&shifted) {
            *c = perm
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &src)| acc | (w >> src & 1) << i);
        }
        candidate.sort_unstable();
        if candidate == target {
            let pure_coset = perm.iter().enumerate().all(|(i, &p)| i == p);
            return Ok(Equivalence {
                equivalent: true,
                translation,
                permutation: Some(perm),
                pure_coset,
            });
        }
        if !next_permutation(&mut perm) {
            return Ok(Equivalence {
                equivalent: false,
                translation,
                permutation: None,
                pure_coset: false,
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub received: Word,
    pub decided: usize,
    /// Every message at minimum distance.
    pub ml_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agreement {
    pub agree: usize,
    pub total: usize,
    pub fraction: f64,
    pub disagreements: Vec<Disagreement>,
}

/// Compares a decoder with ML on every possible received word. A decision
/// anywhere in the ML minimizer set counts as agreement.
pub fn decoder_agreement<D: BlockDecoder + ?Sized>(cb: &Codebook, decoder: &D) -> Result<Agreement> {
    let n = cb.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::arg("block too long for exhaustive agreement"));
    }
    if decoder.n() != n {
        return Err(Error::dim("decoder_agreement", n, decoder.n()));
    }
    let total = 1usize << n;
    let mut disagreements = Vec::new();
    for mask in 0..total as u64 {
        let y = Word::from_mask(mask, n);
        let decided = decoder.decode(&y);
        let (_, ml_set) = ml_candidates(&y, cb);
        if !ml_set.contains(&decided) {
            disagreements.push(Disagreement {
                received: y,
                decided,
                ml_set,
            });
        }
    }
    let agree = total - disagreements.len();
    Ok(Agreement {
        agree,
        total,
        fraction: agree as f64 / total as f64,
        disagreements,
    })
}

/// Everything known about a codebook's structure.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub k: usize,
    pub n: usize,
    pub distinct_words: usize,
    pub is_linear_after_translation: bool,
    pub translation_word: Word,
    pub d_min: usize,
    pub spectrum: DistanceSpectrum,
    pub hamming_equivalent: bool,
    pub pure_coset: bool,
    pub permutation: Option<Vec<usize>>,
}

impl StructureReport {
    /// A (7,4) code with `d_min < 3` is the known sub-optimal convergence.
    pub fn suboptimal_distance(&self) -> bool {
        self.k == 4 && self.n == 7 && self.d_min < 3
    }
}

pub fn structure_report(cb: &Codebook) -> Result<StructureReport> {
    let linearity = check_linearity(cb);
    let equivalence = if cb.k() == 4 && cb.n() == 7 {
        Some(hamming_equivalence(cb)?)
    } else {
        None
    };
    let (hamming_equivalent, pure_coset, permutation) = match equivalence {
        Some(e) => (e.equivalent, e.pure_coset, e.permutation),
        None => (false, false, None),
    };
    Ok(StructureReport {
        k: cb.k(),
        n: cb.n(),
        distinct_words: cb.distinct(),
        is_linear_after_translation: linearity.linear,
        translation_word: linearity.translation,
        d_min: min_distance(cb)?,
        spectrum: distance_spectrum(cb),
        hamming_equivalent,
        pure_coset,
        permutation,
    })
}
