//! Experiment manifest: a config file whose `#` comment lines carry run
//! metadata. Replaying it with `train --config` reproduces the run.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use binae::autoencoder::TrainConfig;

use crate::config::{render, ConfigFile, EvalSettings};
use crate::error::{CliError, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentManifest {
    pub command: String,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub created_unix: u64,
    pub train: TrainConfig,
    pub eval: EvalSettings,
    /// Restart seeds, in restart order.
    pub seeds: Vec<u64>,
    /// `(role, path)` of every artifact the run writes.
    pub artifacts: Vec<(String, PathBuf)>,
}

impl ExperimentManifest {
    pub fn new(command: &str, train: TrainConfig, eval: EvalSettings, artifacts: Vec<(String, PathBuf)>) -> Self {
        let seeds = (0..train.restarts as u64).map(|i| train.seed.wrapping_add(i)).collect();
        ExperimentManifest {
            command: command.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            train,
            eval,
            seeds,
            artifacts,
        }
    }

    pub fn render(&self) -> String {
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let mut out = String::from("# binae experiment manifest\n");
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# tool_version: {}\n", self.tool_version));
        out.push_str(&format!("# created_unix: {}\n", self.created_unix));
        out.push_str(&format!("# seeds: {}\n", seeds.join(" ")));
        for (role, path) in &self.artifacts {
            out.push_str(&format!("# artifact {role}: {}\n", path.display()));
        }
        out.push_str(&render(&self.train, &self.eval));
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let config = ConfigFile::parse(text)?;
        let meta = |key: &str| {
            text.lines()
                .find_map(|l| l.strip_prefix("# ")?.strip_prefix(key)?.strip_prefix(": "))
                .map(str::to_string)
                .ok_or_else(|| CliError::artifact(path, format!("manifest lacks `{key}`")))
        };
        let created_unix = meta("created_unix")?
            .parse()
            .map_err(|_| CliError::artifact(path, "bad created_unix"))?;
        let seeds = meta("seeds")?
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| CliError::artifact(path, "bad seed list")))
            .collect::<Result<Vec<u64>>>()?;
        let artifacts = text
            .lines()
            .filter_map(|l| l.strip_prefix("# artifact "))
            .filter_map(|rest| rest.split_once(": "))
            .map(|(role, p)| (role.to_string(), PathBuf::from(p)))
            .collect();
        Ok(ExperimentManifest {
            command: meta("command")?,
            tool_version: meta("tool_version")?,
            created_unix,
            train: config.train_config()?,
            eval: config.eval_settings()?,
            seeds,
            artifacts,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }
}
