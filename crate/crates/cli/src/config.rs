//! Plain-text config files: `key = value` lines, `#` starts a comment.
//! Precedence when building a run: flags, then file, then defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use binae::autoencoder::TrainConfig;
use binae::eval::{default_grid, grid};

use crate::error::{CliError, Result};

pub const TRAIN_KEYS: [&str; 12] = [
    "k",
    "n",
    "epochs_total",
    "epochs_continuous",
    "batch_size",
    "lr",
    "mask_p_lo",
    "mask_p_hi",
    "train_samples",
    "test_samples",
    "restarts",
    "seed",
];
pub const EVAL_KEYS: [&str; 3] = ["p_grid", "trials_per_p", "eval_seed"];

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSettings {
    pub p_grid: Vec<f64>,
    pub trials_per_p: u64,
    pub seed: u64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            p_grid: default_grid(),
            trials_per_p: 1_000_000,
            seed: 0,
        }
    }
}

/// Parsed `key = value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !TRAIN_KEYS.contains(&key) && !EVAL_KEYS.contains(&key) {
                return Err(CliError::config(format!("line {}: unknown key `{key}`", i + 1)));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::config(format!("line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::config(format!("bad value `{v}` for `{key}`")))
            })
            .transpose()
    }

    /// Defaults overridden by every training key present in the file.
    pub fn train_config(&self) -> Result<TrainConfig> {
        let mut cfg = TrainConfig::default();
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = self.get(stringify!($field))? { cfg.$field = v; })*
            };
        }
        take!(k, n, epochs_total, epochs_continuous, batch_size, lr, mask_p_lo, mask_p_hi, train_samples, test_samples, restarts, seed);
        Ok(cfg)
    }

    pub fn eval_settings(&self) -> Result<EvalSettings> {
        let mut s = EvalSettings::default();
        if let Some(g) = self.values.get("p_grid") {
            s.p_grid = parse_grid(g)?;
        }
        if let Some(t) = self.get("trials_per_p")? {
            s.trials_per_p = t;
        }
        if let Some(seed) = self.get("eval_seed")? {
            s.seed = seed;
        }
        Ok(s)
    }
}

/// `lo:hi:step` or an explicit comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || CliError::config(format!("bad p grid `{text}`"));
    let grid_values = if text.contains(':') {
        let parts = text
            .split(':')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let [lo, hi, step] = parts[..] else {
            return Err(bad());
        };
        grid(lo, hi, step).map_err(|_| bad())?
    } else {
        text.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?
    };
    if grid_values.is_empty() || grid_values.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(bad());
    }
    Ok(grid_values)
}

pub fn format_grid(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Config-file lines for every training and evaluation key.
pub fn render(cfg: &TrainConfig, eval: &EvalSettings) -> String {
    let pairs: [(&str, String); 15] = [
        ("k", cfg.k.to_string()),
        ("n", cfg.n.to_string()),
        ("epochs_total", cfg.epochs_total.to_string()),
        ("epochs_continuous", cfg.epochs_continuous.to_string()),
        ("batch_size", cfg.batch_size.to_string()),
        ("lr", cfg.lr.to_string()),
        ("mask_p_lo", cfg.mask_p_lo.to_string()),
        ("mask_p_hi", cfg.mask_p_hi.to_string()),
        ("train_samples", cfg.train_samples.to_string()),
        ("test_samples", cfg.test_samples.to_string()),
        ("restarts", cfg.restarts.to_string()),
        ("seed", cfg.seed.to_string()),
        ("p_grid", format_grid(&eval.p_grid)),
        ("trials_per_p", eval.trials_per_p.to_string()),
        ("eval_seed", eval.seed.to_string()),
    ];
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
