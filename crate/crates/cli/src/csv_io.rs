//! CSV artifacts. Floats are written in Rust's shortest round-trip form, so
//! reading a file back gives the exact values that were written.

use std::fs::File;
use std::path::Path;

use binae::analysis::DistanceSpectrum;
use binae::autoencoder::{EpochRecord, RestartSummary};
use binae::eval::{BlerCurve, BlerPoint, Pairing};
use binae::nn::Phase;

use crate::error::{CliError, Result};

pub const HISTORY_HEADER: [&str; 4] = ["epoch", "phase", "mean_loss", "val_bler"];
pub const BLER_HEADER: [&str; 5] = ["p", "bler", "se", "trials", "errors"];
pub const RESTART_HEADER: [&str; 6] = ["index", "seed", "d_min", "distinct_words", "val_bler", "selected"];

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::Reader::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::artifact(path, format!("{other:?}")),
    }
}

fn check_header(path: &Path, rdr: &mut csv::Reader<File>, want: &[&str]) -> Result<()> {
    let header = rdr.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().ne(want.iter().copied()) {
        return Err(CliError::artifact(
            path,
            format!("unexpected header `{}`, expected `{}`", header.iter().collect::<Vec<_>>().join(","), want.join(",")),
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(path: &Path, row: usize, rec: &csv::StringRecord, i: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::artifact(path, format!("row {row}: bad value in column {}", i + 1)))
}

pub fn write_history(path: &Path, history: &[EpochRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(HISTORY_HEADER).map_err(|e| csv_error(path, e))?;
    for r in history {
        let val = r.val_bler.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([r.epoch.to_string(), r.phase.tag().to_string(), r.mean_loss.to_string(), val])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_history(path: &Path) -> Result<Vec<EpochRecord>> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &HISTORY_HEADER)?;
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let phase = match rec.get(1) {
            Some("continuous") => Phase::Continuous,
            Some("binarized") => Phase::Binarized,
            _ => return Err(CliError::artifact(path, format!("row {}: unknown phase", row + 1))),
        };
        let val_bler = match rec.get(3) {
            Some("") => None,
            _ => Some(field(path, row + 1, &rec, 3)?),
        };
        out.push(EpochRecord {
            epoch: field(path, row + 1, &rec, 0)?,
            phase,
            mean_loss: field(path, row + 1, &rec, 2)?,
            val_bler,
        });
    }
    Ok(out)
}

/// `bler_{tag}_seed{seed}.csv`
pub fn bler_file_name(pairing: Pairing, seed: u64) -> String {
    format!("bler_{}_seed{seed}.csv", pairing.tag())
}

pub fn write_bler(path: &Path, curve: &BlerCurve) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(BLER_HEADER).map_err(|e| csv_error(path, e))?;
    for pt in &curve.points {
        w.write_record([
            pt.p.to_string(),
            pt.bler.to_string(),
            pt.standard_error.to_string(),
            pt.trials.to_string(),
            pt.errors.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_bler(path: &Path) -> Result<BlerCurve> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &BLER_HEADER)?;
    let mut points = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let p: f64 = field(path, row + 1, &rec, 0)?;
        let trials: u64 = field(path, row + 1, &rec, 3)?;
        let errors: u64 = field(path, row + 1, &rec, 4)?;
        if trials == 0 || errors > trials {
            return Err(CliError::artifact(path, format!("row {}: inconsistent counts", row + 1)));
        }
        points.push(BlerPoint::from_counts(p, errors, trials));
    }
    Ok(BlerCurve { points })
}

pub fn write_restarts(path: &Path, summaries: &[RestartSummary], selected: usize) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RESTART_HEADER).map_err(|e| csv_error(path, e))?;
    for s in summaries {
        w.write_record([
            s.index.to_string(),
            s.seed.to_string(),
            s.d_min.to_string(),
            s.distinct_words.to_string(),
            s.val_bler.to_string(),
            (s.index == selected).to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_restarts(path: &Path) -> Result<(Vec<RestartSummary>, Option<usize>)> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &RESTART_HEADER)?;
    let mut out = Vec::new();
    let mut selected = None;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let s = RestartSummary {
            index: field(path, row + 1, &rec, 0)?,
            seed: field(path, row + 1, &rec, 1)?,
            d_min: field(path, row + 1, &rec, 2)?,
            distinct_words: field(path, row + 1, &rec, 3)?,
            val_bler: field(path, row + 1, &rec, 4)?,
        };
        if field::<bool>(path, row + 1, &rec, 5)? {
            selected = Some(s.index);
        }
        out.push(s);
    }
    Ok((out, selected))
}

/// One header row `d0,…,dn` and one row of counts, in distance order.
pub fn write_spectrum(path: &Path, spectrum: &DistanceSpectrum) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record((0..spectrum.counts.len()).map(|d| format!("d{d}")))
        .map_err(|e| csv_error(path, e))?;
    w.write_record(spectrum.counts.iter().map(|c| c.to_string()))
        .map_err(|e| csv_error(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_spectrum(path: &Path) -> Result<DistanceSpectrum> {
    let mut rdr = reader(path)?;
    let width = rdr.headers().map_err(|e| csv_error(path, e))?.len();
    let rec = rdr
        .records()
        .next()
        .ok_or_else(|| CliError::artifact(path, "missing spectrum row"))?
        .map_err(|e| csv_error(path, e))?;
    let counts = (0..width).map(|i| field(path, 1, &rec, i)).collect::<Result<Vec<f64>>>()?;
    Ok(DistanceSpectrum { counts })
}
