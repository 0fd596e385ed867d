//! Structure and agreement reports, as `key: value` text and as JSON.

use std::path::Path;

use binae::analysis::{Agreement, DistanceSpectrum, StructureReport};
use binae::channel::Word;
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const SUBOPTIMAL_NOTE: &str =
    "d_min below 3: the run converged to a sub-optimal code; retrain with more restarts or another seed";

fn word_text(w: &Word) -> String {
    w.symbols()
        .iter()
        .map(|&s| if s > 0 { "+1" } else { "-1" })
        .collect::<Vec<_>>()
        .join(" ")
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

pub fn structure_text(r: &StructureReport) -> String {
    let permutation = r.permutation.as_deref().map(join).unwrap_or_else(|| "none".into());
    let mut out = String::new();
    let mut line = |k: &str, v: String| out.push_str(&format!("{k}: {v}\n"));
    line("k", r.k.to_string());
    line("n", r.n.to_string());
    line("distinct_words", r.distinct_words.to_string());
    line("d_min", r.d_min.to_string());
    line("spectrum", join(&r.spectrum.counts));
    line("is_linear_after_translation", r.is_linear_after_translation.to_string());
    line("translation_word", word_text(&r.translation_word));
    line("hamming_equivalent", r.hamming_equivalent.to_string());
    line("pure_coset", r.pure_coset.to_string());
    line("permutation", permutation);
    line("suboptimal_distance", r.suboptimal_distance().to_string());
    if r.suboptimal_distance() {
        line("note", SUBOPTIMAL_NOTE.into());
    }
    out
}

pub fn parse_structure_text(text: &str, path: &Path) -> Result<StructureReport> {
    let get = |key: &str| -> Result<&str> {
        text.lines()
            .find_map(|l| l.strip_prefix(key).and_then(|rest| rest.strip_prefix(": ")))
            .ok_or_else(|| CliError::artifact(path, format!("missing key `{key}`")))
    };
    let bad = |key: &str| CliError::artifact(path, format!("bad value for `{key}`"));
    let num = |key: &str| get(key)?.parse::<usize>().map_err(|_| bad(key));
    let flag = |key: &str| get(key)?.parse::<bool>().map_err(|_| bad(key));
    let counts = get("spectrum")?
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| bad("spectrum")))
        .collect::<Result<Vec<_>>>()?;
    let symbols = get("translation_word")?
        .split_whitespace()
        .map(|t| match t {
            "+1" => Ok(1),
            "-1" => Ok(-1),
            _ => Err(bad("translation_word")),
        })
        .collect::<Result<Vec<i8>>>()?;
    let permutation = match get("permutation")? {
        "none" => None,
        s => Some(
            s.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad("permutation")))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok(StructureReport {
        k: num("k")?,
        n: num("n")?,
        distinct_words: num("distinct_words")?,
        is_linear_after_translation: flag("is_linear_after_translation")?,
        translation_word: Word::new(symbols).map_err(|_| bad("translation_word"))?,
        d_min: num("d_min")?,
        spectrum: DistanceSpectrum { counts },
        hamming_equivalent: flag("hamming_equivalent")?,
        pure_coset: flag("pure_coset")?,
        permutation,
    })
}

pub fn structure_json(r: &StructureReport) -> Value {
    json!({
        "k": r.k,
        "n": r.n,
        "distinct_words": r.distinct_words,
        "d_min": r.d_min,
        "spectrum": r.spectrum.counts,
        "is_linear_after_translation": r.is_linear_after_translation,
        "translation_word": r.translation_word.symbols(),
        "hamming_equivalent": r.hamming_equivalent,
        "pure_coset": r.pure_coset,
        "permutation": r.permutation,
        "suboptimal_distance": r.suboptimal_distance(),
    })
}

pub fn parse_structure_json(text: &str, path: &Path) -> Result<StructureReport> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::artifact(path, e.to_string()))?;
    let bad = |key: &str| CliError::artifact(path, format!("bad or missing `{key}`"));
    let num = |key: &str| v[key].as_u64().map(|x| x as usize).ok_or_else(|| bad(key));
    let flag = |key: &str| v[key].as_bool().ok_or_else(|| bad(key));
    let counts = v["spectrum"]
        .as_array()
        .ok_or_else(|| bad("spectrum"))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| bad("spectrum")))
        .collect::<Result<Vec<_>>>()?;
    let symbols = v["translation_word"]
        .as_array()
        .ok_or_else(|| bad("translation_word"))?
        .iter()
        .map(|x| x.as_i64().map(|s| s as i8).ok_or_else(|| bad("translation_word")))
        .collect::<Result<Vec<_>>>()?;
    let permutation = match &v["permutation"] {
        Value::Null => None,
        Value::Array(a) => Some(
            a.iter()
                .map(|x| x.as_u64().map(|p| p as usize).ok_or_else(|| bad("permutation")))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => return Err(bad("permutation")),
    };
    Ok(StructureReport {
        k: num("k")?,
        n: num("n")?,
        distinct_words: num("distinct_words")?,
        is_linear_after_translation: flag("is_linear_after_translation")?,
        translation_word: Word::new(symbols).map_err(|_| bad("translation_word"))?,
        d_min: num("d_min")?,
        spectrum: DistanceSpectrum { counts },
        hamming_equivalent: flag("hamming_equivalent")?,
        pure_coset: flag("pure_coset")?,
        permutation,
    })
}

/// Agreement summary followed by one line per disagreeing received word.
pub fn agreement_text(a: &Agreement) -> String {
    let mut out = format!(
        "agree: {}\ntotal: {}\nfraction: {}\ndisagreements: {}\n",
        a.agree,
        a.total,
        a.fraction,
        a.disagreements.len()
    );
    for d in &a.disagreements {
        out.push_str(&format!(
            "received {} decided {} ml {}\n",
            word_text(&d.received),
            d.decided,
            join(&d.ml_set)
        ));
    }
    out
}
