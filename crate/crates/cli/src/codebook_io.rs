//! Codebook text format: a header line `k n`, then one line per codeword in
//! message order with space-separated `+1` / `-1` symbols.

use std::fs;
use std::path::Path;

use binae::channel::Word;
use binae::classic::Codebook;

use crate::error::{CliError, Result};

pub fn format_codebook(cb: &Codebook) -> String {
    let mut out = format!("{} {}\n", cb.k(), cb.n());
    for w in cb.words() {
        let line: Vec<&str> = w.symbols().iter().map(|&s| if s > 0 { "+1" } else { "-1" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_codebook(text: &str, path: &Path) -> Result<Codebook> {
    let bad = |line: usize, msg: &str| CliError::artifact(path, format!("line {line}: {msg}"));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| CliError::artifact(path, "empty codebook file"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad(1, "header must be `k n`"))?;
    let [k, n] = dims[..] else {
        return Err(bad(1, "header must be `k n`"));
    };
    if k > 30 {
        return Err(bad(1, "k too large"));
    }
    let mut words = Vec::with_capacity(1 << k);
    for (i, line) in lines {
        let symbols = line
            .split_whitespace()
            .map(|t| match t {
                "+1" => Ok(1i8),
                "-1" => Ok(-1i8),
                _ => Err(bad(i + 1, &format!("symbol `{t}` is not +1 or -1"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if symbols.len() != n {
            return Err(bad(i + 1, &format!("expected {n} symbols, found {}", symbols.len())));
        }
        words.push(Word::new(symbols).map_err(|e| bad(i + 1, &e.to_string()))?);
    }
    if words.len() != 1 << k {
        return Err(CliError::artifact(
            path,
            format!("expected {} codewords, found {}", 1usize << k, words.len()),
        ));
    }
    Codebook::new(k, n, words).map_err(|e| CliError::artifact(path, e.to_string()))
}

pub fn save_codebook(cb: &Codebook, path: &Path) -> Result<()> {
    fs::write(path, format_codebook(cb)).map_err(|e| CliError::io(path, e))
}

pub fn load_codebook(path: &Path) -> Result<Codebook> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_codebook(&text, path)
}
