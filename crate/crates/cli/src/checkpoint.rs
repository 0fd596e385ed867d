//! Binary checkpoint of a [`NetParams`].
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic     6 bytes  "BINAE1" (the trailing digit is the format version)
//! k         u32
//! n         u32
//! phase     u8       0 continuous, 1 binarized
//! count     u64      number of f64 values that follow
//! values    f64 × count
//! ```
//!
//! Values are the trainable tensors in [`NetParams::tensor_names`] order
//! (weights row-major, `out × in`), then the batch-norm running mean and
//! running variance.

use std::fs;
use std::path::Path;

use binae::nn::{NetParams, Phase};
use binae::numerics::{Rng, Stream};

use crate::error::{CliError, Result};

pub const MAGIC_PREFIX: &[u8; 5] = b"BINAE";
pub const FORMAT_VERSION: u8 = b'1';
const HEADER_LEN: usize = 6 + 4 + 4 + 1 + 8;

pub fn encode_checkpoint(params: &NetParams, phase: Phase) -> Vec<u8> {
    let count = params.parameter_count();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * count);
    out.extend_from_slice(MAGIC_PREFIX);
    out.push(FORMAT_VERSION);
    out.extend_from_slice(&(params.k as u32).to_le_bytes());
    out.extend_from_slice(&(params.n as u32).to_le_bytes());
    out.push(match phase {
        Phase::Continuous => 0,
        Phase::Binarized => 1,
    });
    out.extend_from_slice(&(count as u64).to_le_bytes());
    let norm = &params.encoder.norm;
    let tensors = params.trainable();
    let values = tensors
        .iter()
        .flat_map(|t| t.iter())
        .chain(&norm.running_mean)
        .chain(&norm.running_var);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses a checkpoint. `expected` pins `(k, n)` when the caller knows them.
pub fn decode_checkpoint(bytes: &[u8], expected: Option<(usize, usize)>, path: &Path) -> Result<(NetParams, Phase)> {
    let corrupt = |msg: &str| CliError::artifact(path, format!("corrupt checkpoint: {msg}"));
    if bytes.len() < HEADER_LEN {
        return Err(corrupt("truncated header"));
    }
    if &bytes[..5] != MAGIC_PREFIX {
        return Err(corrupt("bad magic"));
    }
    if bytes[5] != FORMAT_VERSION {
        return Err(CliError::artifact(
            path,
            format!(
                "checkpoint format version {} is not supported (expected {})",
                bytes[5] as char, FORMAT_VERSION as char
            ),
        ));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
    let k = u32_at(6);
    let n = u32_at(10);
    let phase = match bytes[14] {
        0 => Phase::Continuous,
        1 => Phase::Binarized,
        _ => return Err(corrupt("unknown phase tag")),
    };
    let count = u64::from_le_bytes(bytes[15..23].try_into().expect("8 bytes"));
    if let Some((ek, en)) = expected {
        if (ek, en) != (k, n) {
            return Err(CliError::artifact(
                path,
                format!("dimension mismatch: checkpoint has k={k}, n={n}; expected k={ek}, n={en}"),
            ));
        }
    }
    if k == 0 || k > 16 || n == 0 || n > 64 {
        return Err(corrupt("implausible dimensions"));
    }
    // A zero-seeded network gives the shapes; every value is overwritten.
    let mut params = NetParams::init(k, n, &mut Rng::new(0, Stream::Init)).map_err(|e| corrupt(&e.to_string()))?;
    if count != params.parameter_count() as u64 {
        return Err(corrupt("parameter count does not match k and n"));
    }
    let body = &bytes[HEADER_LEN..];
    if body.len() as u64 != 8 * count {
        return Err(corrupt(if (body.len() as u64) < 8 * count {
            "truncated parameter block"
        } else {
            "trailing bytes after parameter block"
        }));
    }
    let mut values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    for tensor in params.trainable_mut() {
        for slot in tensor.iter_mut() {
            *slot = values.next().expect("length checked");
        }
    }
    let norm = &mut params.encoder.norm;
    for slot in norm.running_mean.iter_mut().chain(norm.running_var.iter_mut()) {
        *slot = values.next().expect("length checked");
    }
    Ok((params, phase))
}

pub fn save_checkpoint(params: &NetParams, phase: Phase, path: &Path) -> Result<()> {
    fs::write(path, encode_checkpoint(params, phase)).map_err(|e| CliError::io(path, e))
}

pub fn load_checkpoint(path: &Path, expected: Option<(usize, usize)>) -> Result<(NetParams, Phase)> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode_checkpoint(&bytes, expected, path)
}
