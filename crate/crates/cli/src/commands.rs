use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use binae::analysis::{decoder_agreement, structure_report, Agreement, StructureReport};
use binae::autoencoder::{extract_codebook, NeuralDecoder, RestartOutcome, TrainConfig};
use binae::classic::Codebook;
use binae::eval::{compare_curves, BlerCurve, CurveComparison, EvalConfig, Pairing};
use clap::{Args, Parser, Subcommand};

use crate::checkpoint::{load_checkpoint, save_checkpoint};
use crate::codebook_io::{load_codebook, save_codebook};
use crate::config::{parse_grid, ConfigFile};
use crate::csv_io::{bler_file_name, read_bler, write_bler, write_history, write_restarts, write_spectrum};
use crate::error::{CliError, Result};
use crate::manifest::ExperimentManifest;
use crate::report::{agreement_text, structure_json, structure_text};
use crate::run::{bler_curve, pairing_parts, train_restarts};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BINAE_OUT_DIR";

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const CODEBOOK_FILE: &str = "codebook.txt";
pub const HISTORY_FILE: &str = "history.csv";
pub const RESTARTS_FILE: &str = "restarts.csv";
pub const TRAIN_REPORT_FILE: &str = "train_report.txt";
pub const STRUCTURE_TEXT_FILE: &str = "structure.txt";
pub const STRUCTURE_JSON_FILE: &str = "structure.json";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const AGREEMENT_FILE: &str = "agreement.txt";
pub const COMPARISON_FILE: &str = "comparison.txt";

#[derive(Debug, Parser)]
#[command(name = "binae", version, about = "Binary autoencoder channel codes for the binary symmetric channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the autoencoder with restarts and write model artifacts.
    Train(TrainArgs),
    /// Monte Carlo BLER curves for encoder/decoder pairings.
    Eval(EvalArgs),
    /// Distance spectrum, linearity, Hamming equivalence, decoder agreement.
    Analyze(AnalyzeArgs),
    /// Merge BLER CSVs into one comparison table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutArg {
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = "binae-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Config file of `key = value` lines; a manifest works too.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub epochs_total: Option<usize>,
    #[arg(long)]
    pub epochs_continuous: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub mask_p_lo: Option<f64>,
    #[arg(long)]
    pub mask_p_hi: Option<f64>,
    #[arg(long)]
    pub train_samples: Option<usize>,
    #[arg(long)]
    pub test_samples: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Pairing tag; repeatable. One of hamming-ml, hamming-aedec, ae-ml, ae-aedec.
    #[arg(long, value_parser = parse_pairing)]
    pub pairing: Vec<Pairing>,
    /// All four pairings.
    #[arg(long)]
    pub all: bool,
    /// Checkpoint of a trained model, needed by the autoencoder pairings.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Codebook file to use as the learned encoder instead of the one
    /// extracted from the checkpoint.
    #[arg(long)]
    pub codebook: Option<PathBuf>,
    /// `lo:hi:step` or a comma-separated list.
    #[arg(long)]
    pub p_grid: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub codebook: PathBuf,
    /// Checkpoint whose decoder is compared with ML on every received word.
    #[arg(long)]
    pub decoder: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// BLER CSV files, or directories searched for `bler_*.csv`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Also write the merged table as CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_pairing(s: &str) -> std::result::Result<Pairing, String> {
    Pairing::from_tag(s).ok_or_else(|| {
        let tags: Vec<&str> = Pairing::ALL.iter().map(|p| p.tag()).collect();
        format!("unknown pairing `{s}`; expected one of {}", tags.join(", "))
    })
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(a) => cmd_train(&a).map(|_| ()),
        Command::Eval(a) => cmd_eval(&a).map(|_| ()),
        Command::Analyze(a) => cmd_analyze(&a).map(|_| ()),
        Command::Report(a) => cmd_report(&a).map(|_| ()),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    path.map(ConfigFile::load).transpose().map(Option::unwrap_or_default)
}

pub fn resolve_train_config(args: &TrainArgs) -> Result<TrainConfig> {
    let mut cfg = load_config(args.config.as_deref())?.train_config()?;
    macro_rules! flag {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field { cfg.$field = v; })*
        };
    }
    flag!(k, n, epochs_total, epochs_continuous, batch_size, lr, mask_p_lo, mask_p_hi, train_samples, test_samples, restarts, seed);
    cfg.validate()?;
    Ok(cfg)
}

/// What `train` leaves behind, for callers that drive the CLI as a library.
#[derive(Debug)]
pub struct TrainRun {
    pub outcome: RestartOutcome,
    pub report: StructureReport,
    pub agreement: Option<Agreement>,
    pub dir: PathBuf,
}

pub fn cmd_train(args: &TrainArgs) -> Result<TrainRun> {
    let cfg = resolve_train_config(args)?;
    let eval = load_config(args.config.as_deref())?.eval_settings()?;
    let dir = args.out.out.clone();
    ensure_dir(&dir)?;
    let artifacts = [
        ("checkpoint", CHECKPOINT_FILE),
        ("codebook", CODEBOOK_FILE),
        ("history", HISTORY_FILE),
        ("restarts", RESTARTS_FILE),
        ("report", TRAIN_REPORT_FILE),
    ]
    .iter()
    .map(|(role, file)| (role.to_string(), dir.join(file)))
    .collect();
    ExperimentManifest::new("train", cfg.clone(), eval, artifacts).save(&dir.join(MANIFEST_FILE))?;
    eprintln!(
        "training {} restart(s) of a ({}, {}) autoencoder, seed {}",
        cfg.restarts, cfg.n, cfg.k, cfg.seed
    );

    let outcome = train_restarts(&cfg)?;
    let best = &outcome.best;
    save_checkpoint(&best.params, best.phase, &dir.join(CHECKPOINT_FILE))?;
    save_codebook(&best.codebook, &dir.join(CODEBOOK_FILE))?;
    write_history(&dir.join(HISTORY_FILE), &best.history)?;
    write_restarts(&dir.join(RESTARTS_FILE), &outcome.summaries, outcome.best_index)?;

    let report = structure_report(&best.codebook)?;
    let agreement = if cfg.n <= binae::eval::MAX_ENUMERATION_N {
        Some(decoder_agreement(&best.codebook, &best.decoder())?)
    } else {
        None
    };
    let text = train_report_text(&outcome, &report, agreement.as_ref());
    write_text(&dir.join(TRAIN_REPORT_FILE), &text)?;
    print!("{text}");
    Ok(TrainRun {
        outcome,
        report,
        agreement,
        dir,
    })
}

pub fn train_report_text(outcome: &RestartOutcome, report: &StructureReport, agreement: Option<&Agreement>) -> String {
    let mut out = String::from("restart  seed  d_min  distinct  val_bler\n");
    for s in &outcome.summaries {
        let mark = if s.index == outcome.best_index { "  <- selected" } else { "" };
        out.push_str(&format!(
            "{:>7}  {:>4}  {:>5}  {:>8}  {:.6}{mark}\n",
            s.index, s.seed, s.d_min, s.distinct_words, s.val_bler
        ));
    }
    let hits = outcome.summaries.iter().filter(|s| s.d_min >= 3).count();
    out.push_str(&format!("restarts_with_d_min_3: {hits}/{}\n", outcome.summaries.len()));
    out.push_str(&structure_text(report));
    if let Some(a) = agreement {
        out.push_str(&format!("decoder_ml_agreement: {}/{}\n", a.agree, a.total));
        if a.agree < a.total {
            out.push_str("flag: the neural decoder departs from ML decoding on its own codebook\n");
            out.push_str(&agreement_text(a));
        }
    }
    out
}

pub fn resolve_eval_config(args: &EvalArgs) -> Result<(Vec<Pairing>, Vec<f64>, u64, u64)> {
    let file = load_config(args.config.as_deref())?.eval_settings()?;
    let grid = args.p_grid.as_deref().map(parse_grid).transpose()?.unwrap_or(file.p_grid);
    let trials = args.trials.unwrap_or(file.trials_per_p);
    if trials == 0 {
        return Err(CliError::config("trials must be positive"));
    }
    let seed = args.seed.unwrap_or(file.seed);
    let mut pairings = if args.all { Pairing::ALL.to_vec() } else { args.pairing.clone() };
    pairings.sort();
    pairings.dedup();
    if pairings.is_empty() {
        return Err(CliError::config("choose at least one --pairing, or --all"));
    }
    Ok((pairings, grid, trials, seed))
}

#[derive(Debug)]
pub struct EvalRun {
    pub curves: Vec<(Pairing, BlerCurve)>,
    /// Every other pairing against hamming-ml, when it was evaluated.
    pub comparisons: Vec<(Pairing, CurveComparison)>,
    pub skipped: Vec<(Pairing, String)>,
}

pub fn cmd_eval(args: &EvalArgs) -> Result<EvalRun> {
    let (pairings, grid, trials, seed) = resolve_eval_config(args)?;
    let model = match &args.model {
        Some(path) => {
            let (params, _) = load_checkpoint(path, None)?;
            let codebook = match &args.codebook {
                Some(cb_path) => {
                    let cb = load_codebook(cb_path)?;
                    if (cb.k(), cb.n()) != (params.k, params.n) {
                        return Err(CliError::artifact(cb_path, "codebook dimensions differ from the checkpoint"));
                    }
                    cb
                }
                None => extract_codebook(&params),
            };
            Some((codebook, params))
        }
        None => {
            if let Some(p) = pairings.iter().find(|p| p.needs_model()) {
                return Err(CliError::config(format!("pairing {} needs --model", p.tag())));
            }
            None
        }
    };
    let dir = args.out.out.clone();
    ensure_dir(&dir)?;

    let mut curves = Vec::new();
    let mut skipped = Vec::new();
    for &pairing in &pairings {
        let parts = pairing_parts(pairing, model.as_ref().map(|(c, p)| (c, p)));
        let (encoder, decoder) = match parts {
            Ok(parts) => parts,
            // With --all, a pairing the model cannot support is reported, not fatal.
            Err(CliError::Config(msg)) if args.all => {
                eprintln!("skipping {}: {msg}", pairing.tag());
                skipped.push((pairing, msg));
                continue;
            }
            Err(e) => return Err(e),
        };
        let cfg = EvalConfig {
            p_grid: grid.clone(),
            trials_per_p: trials,
            seed,
            pairing,
        };
        let curve = bler_curve(&cfg, &encoder, &decoder)?;
        write_bler(&dir.join(bler_file_name(pairing, seed)), &curve)?;
        curves.push((pairing, curve));
    }

    let mut comparisons = Vec::new();
    if let Some((_, reference)) = curves.iter().find(|(p, _)| *p == Pairing::HammingMl) {
        for (pairing, curve) in curves.iter().filter(|(p, _)| *p != Pairing::HammingMl) {
            comparisons.push((*pairing, compare_curves(curve, reference)?));
        }
    }
    let text = eval_report_text(&curves, &comparisons, &skipped);
    write_text(&dir.join(COMPARISON_FILE), &text)?;
    print!("{text}");
    Ok(EvalRun {
        curves,
        comparisons,
        skipped,
    })
}

pub fn eval_report_text(
    curves: &[(Pairing, BlerCurve)],
    comparisons: &[(Pairing, CurveComparison)],
    skipped: &[(Pairing, String)],
) -> String {
    let mut out = String::new();
    if let Some((_, first)) = curves.first() {
        out.push_str(&format!("{:>6}", "p"));
        for (p, _) in curves {
            out.push_str(&format!("  {:>14}", p.tag()));
        }
        out.push('\n');
        for (i, pt) in first.points.iter().enumerate() {
            out.push_str(&format!("{:>6}", pt.p));
            for (_, c) in curves {
                out.push_str(&format!("  {:>14.6e}", c.points[i].bler));
            }
            out.push('\n');
        }
    }
    for (pairing, cmp) in comparisons {
        let zs: Vec<String> = cmp.z.iter().map(|z| format!("{z:.2}")).collect();
        out.push_str(&format!(
            "{} vs hamming-ml: max|z| {:.3}, max ratio {:.4}, flagged {}, z [{}]\n",
            pairing.tag(),
            cmp.max_abs_z,
            cmp.max_ratio,
            cmp.flagged,
            zs.join(" ")
        ));
    }
    for (pairing, why) in skipped {
        out.push_str(&format!("{} skipped: {why}\n", pairing.tag()));
    }
    out
}

#[derive(Debug)]
pub struct AnalyzeRun {
    pub codebook: Codebook,
    pub report: StructureReport,
    pub agreement: Option<Agreement>,
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<AnalyzeRun> {
    let codebook = load_codebook(&args.codebook)?;
    let report = structure_report(&codebook)?;
    let agreement = match &args.decoder {
        Some(path) => {
            let (params, _) = load_checkpoint(path, Some((codebook.k(), codebook.n())))?;
            Some(decoder_agreement(&codebook, &NeuralDecoder::new(&params))?)
        }
        None => None,
    };
    let dir = args.out.out.clone();
    ensure_dir(&dir)?;
    let text = structure_text(&report);
    write_text(&dir.join(STRUCTURE_TEXT_FILE), &text)?;
    let json = serde_json::to_string_pretty(&structure_json(&report)).expect("report serializes");
    write_text(&dir.join(STRUCTURE_JSON_FILE), &(json + "\n"))?;
    write_spectrum(&dir.join(SPECTRUM_FILE), &report.spectrum)?;
    print!("{text}");
    if let Some(a) = &agreement {
        let text = agreement_text(a);
        write_text(&dir.join(AGREEMENT_FILE), &text)?;
        print!("{text}");
    }
    Ok(AnalyzeRun {
        codebook,
        report,
        agreement,
    })
}

/// Label of a BLER file: its stem without the `bler_` prefix.
fn curve_label(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
    stem.strip_prefix("bler_").unwrap_or(stem).to_string()
}

fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| CliError::io(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("bler_") && n.ends_with(".csv"))
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::config("no BLER CSV files found"));
    }
    Ok(files)
}

/// Merged table: one row per `p`, a `bler` and `se` column per input.
pub fn cmd_report(args: &ReportArgs) -> Result<Vec<(String, BlerCurve)>> {
    let files = collect_inputs(&args.inputs)?;
    let curves = files
        .iter()
        .map(|f| Ok((curve_label(f), read_bler(f)?)))
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<f64> = curves[0].1.points.iter().map(|pt| pt.p).collect();
    for (file, (_, c)) in files.iter().zip(&curves) {
        if c.points.iter().map(|pt| pt.p).ne(grid.iter().copied()) {
            return Err(CliError::artifact(file, "p grid differs from the first input"));
        }
    }
    let mut header = vec!["p".to_string()];
    for (label, _) in &curves {
        header.push(format!("{label}_bler"));
        header.push(format!("{label}_se"));
    }
    let rows: Vec<Vec<String>> = grid
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut row = vec![p.to_string()];
            for (_, c) in &curves {
                row.push(c.points[i].bler.to_string());
                row.push(c.points[i].standard_error.to_string());
            }
            row
        })
        .collect();

    let mut stdout = std::io::stdout().lock();
    let widths: Vec<usize> = (0..header.len())
        .map(|j| rows.iter().map(|r| r[j].len()).chain([header[j].len()]).max().unwrap_or(0))
        .collect();
    for line in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(stdout, "{}", cells.join("  "));
    }
    if let Some(path) = &args.output {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::artifact(path, e.to_string()))?;
        for line in std::iter::once(&header).chain(&rows) {
            w.write_record(line).map_err(|e| CliError::artifact(path, e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(curves)
}
