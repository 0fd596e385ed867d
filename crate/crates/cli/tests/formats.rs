mod common;

use std::fs;
use std::path::Path;

use binae::analysis::{decoder_agreement, structure_report, DistanceSpectrum};
use binae::autoencoder::{EpochRecord, NeuralDecoder, RestartSummary, TrainConfig};
use binae::classic::hamming74_codebook;
use binae::eval::{BlerCurve, BlerPoint, Pairing};
use binae::nn::{NetParams, Phase};
use binae::numerics::{Rng, Stream};
use binae_cli::checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint};
use binae_cli::codebook_io::{format_codebook, load_codebook, parse_codebook, save_codebook};
use binae_cli::commands::{resolve_train_config, OutArg, TrainArgs};
use binae_cli::config::{parse_grid, render, ConfigFile, EvalSettings};
use binae_cli::csv_io::*;
use binae_cli::manifest::ExperimentManifest;
use binae_cli::report::{parse_structure_json, parse_structure_text, structure_json, structure_text};
use binae_cli::CliError;

fn bits(params: &NetParams) -> Vec<u64> {
    let norm = &params.encoder.norm;
    params
        .trainable()
        .iter()
        .flat_map(|t| t.iter())
        .chain(&norm.running_mean)
        .chain(&norm.running_var)
        .map(|v| v.to_bits())
        .collect()
}

fn random_params(k: usize, n: usize, seed: u64) -> NetParams {
    let mut rng = Rng::new(seed, Stream::Init);
    let mut p = NetParams::init(k, n, &mut rng).unwrap();
    for t in p.trainable_mut() {
        for x in t.iter_mut() {
            *x = rng.uniform(-3.0, 3.0).unwrap() / 7.0;
        }
    }
    for x in p.encoder.norm.running_mean.iter_mut() {
        *x = rng.uniform(-1.0, 1.0).unwrap();
    }
    for x in p.encoder.norm.running_var.iter_mut() {
        *x = rng.uniform(0.1, 2.0).unwrap();
    }
    p
}

#[test]
fn checkpoint_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    for (k, n, phase) in [(4, 7, Phase::Binarized), (2, 3, Phase::Continuous), (3, 9, Phase::Binarized)] {
        let params = random_params(k, n, k as u64 * 31 + n as u64);
        let path = dir.path().join(format!("m{k}{n}.ckpt"));
        save_checkpoint(&params, phase, &path).unwrap();
        let (back, back_phase) = load_checkpoint(&path, Some((k, n))).unwrap();
        assert_eq!(bits(&back), bits(&params));
        assert_eq!(back, params);
        assert_eq!(back_phase, phase);
        let len = fs::metadata(&path).unwrap().len() as usize;
        assert_eq!(len, 23 + 8 * params.parameter_count());
    }
}

#[test]
fn checkpoint_header_layout() {
    let params = random_params(4, 7, 1);
    let bytes = encode_checkpoint(&params, Phase::Binarized);
    assert_eq!(&bytes[..6], b"BINAE1");
    assert_eq!(u32::from_le_bytes(bytes[6..10].try_into().unwrap()), 4);
    assert_eq!(u32::from_le_bytes(bytes[10..14].try_into().unwrap()), 7);
    assert_eq!(bytes[14], 1);
    assert_eq!(u64::from_le_bytes(bytes[15..23].try_into().unwrap()), params.parameter_count() as u64);
    // First value is encoder.input.weight[0][0].
    let first = f64::from_le_bytes(bytes[23..31].try_into().unwrap());
    assert_eq!(first.to_bits(), params.encoder.input.weight.get(0, 0).to_bits());
}

fn expect_artifact(r: Result<(NetParams, Phase), CliError>, needle: &str) {
    match r {
        Err(e @ CliError::Artifact { .. }) => {
            assert!(e.to_string().contains(needle), "`{e}` lacks `{needle}`");
            assert_eq!(e.exit_code(), 3);
        }
        other => panic!("expected artifact error, got {other:?}"),
    }
}

#[test]
fn checkpoint_errors() {
    let path = Path::new("x.ckpt");
    let good = encode_checkpoint(&random_params(4, 7, 2), Phase::Binarized);
    expect_artifact(decode_checkpoint(&good, Some((3, 7)), path), "dimension mismatch");
    expect_artifact(decode_checkpoint(&good[..good.len() - 3], None, path), "truncated");
    expect_artifact(decode_checkpoint(&good[..10], None, path), "truncated header");
    let mut longer = good.clone();
    longer.push(0);
    expect_artifact(decode_checkpoint(&longer, None, path), "trailing");
    let mut version = good.clone();
    version[5] = b'2';
    expect_artifact(decode_checkpoint(&version, None, path), "version");
    let mut magic = good.clone();
    magic[0] = b'X';
    expect_artifact(decode_checkpoint(&magic, None, path), "bad magic");
    let mut phase = good.clone();
    phase[14] = 9;
    expect_artifact(decode_checkpoint(&phase, None, path), "phase");
    let mut count = good;
    count[15] ^= 1;
    expect_artifact(decode_checkpoint(&count, None, path), "parameter count");
    let missing = load_checkpoint(Path::new("/nonexistent/model.ckpt"), None).unwrap_err();
    assert_eq!(missing.exit_code(), 3);
}

#[test]
fn codebook_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let text = format_codebook(&hamming74_codebook());
    assert!(text.starts_with("4 7\n+1 +1 +1 +1 +1 +1 +1\n"));
    assert_eq!(text.lines().count(), 17);
    for cb in [hamming74_codebook(), common::distance_two_codebook()] {
        let path = dir.path().join("cb.txt");
        save_codebook(&cb, &path).unwrap();
        assert_eq!(load_codebook(&path).unwrap(), cb);
        assert_eq!(fs::read_to_string(&path).unwrap(), format_codebook(&cb));
    }
}

#[test]
fn malformed_codebooks() {
    let p = Path::new("cb.txt");
    let cases = [
        ("", "empty"),
        ("4\n", "header"),
        ("1 2\n+1 +1\n+1 0\n", "symbol"),
        ("1 2\n+1 +1\n", "expected 2 codewords"),
        ("1 2\n+1 +1\n-1\n", "expected 2 symbols"),
    ];
    for (text, needle) in cases {
        let e = parse_codebook(text, p).unwrap_err();
        assert!(e.to_string().contains(needle), "`{e}` lacks `{needle}`");
        assert_eq!(e.exit_code(), 3);
    }
}

#[test]
fn csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let history = vec![
        EpochRecord { epoch: 0, phase: Phase::Continuous, mean_loss: 2.7725887222397811, val_bler: Some(0.123456789) },
        EpochRecord { epoch: 1, phase: Phase::Binarized, mean_loss: 0.1 + 0.2, val_bler: None },
    ];
    let path = dir.path().join("h.csv");
    write_history(&path, &history).unwrap();
    assert!(fs::read_to_string(&path).unwrap().starts_with("epoch,phase,mean_loss,val_bler\n"));
    assert_eq!(read_history(&path).unwrap(), history);

    let curve = BlerCurve {
        points: vec![BlerPoint::from_counts(0.01, 2031, 1_000_000), BlerPoint::from_counts(0.1, 0, 10)],
    };
    let path = dir.path().join(bler_file_name(Pairing::AeMl, 42));
    assert!(path.ends_with("bler_ae-ml_seed42.csv"));
    write_bler(&path, &curve).unwrap();
    assert!(fs::read_to_string(&path).unwrap().starts_with("p,bler,se,trials,errors\n"));
    assert_eq!(read_bler(&path).unwrap(), curve);

    let summaries = vec![
        RestartSummary { index: 0, seed: 3, d_min: 2, distinct_words: 16, val_bler: 0.15 },
        RestartSummary { index: 1, seed: 4, d_min: 3, distinct_words: 16, val_bler: 0.1 },
    ];
    let path = dir.path().join("r.csv");
    write_restarts(&path, &summaries, 1).unwrap();
    assert_eq!(read_restarts(&path).unwrap(), (summaries, Some(1)));

    let spectrum = DistanceSpectrum { counts: vec![1.0, 0.0, 0.0, 7.0, 7.0, 0.0, 0.0, 1.0] };
    let path = dir.path().join("s.csv");
    write_spectrum(&path, &spectrum).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "d0,d1,d2,d3,d4,d5,d6,d7\n1,0,0,7,7,0,0,1\n");
    assert_eq!(read_spectrum(&path).unwrap(), spectrum);
}

#[test]
fn bad_csv_header_is_an_artifact_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    fs::write(&path, "p,bler\n0.1,0.2\n").unwrap();
    assert_eq!(read_bler(&path).unwrap_err().exit_code(), 3);
}

#[test]
fn structure_report_round_trips() {
    let p = Path::new("r");
    for cb in [
        hamming74_codebook(),
        hamming74_codebook().permute(&[6, 5, 4, 3, 2, 1, 0]),
        common::distance_two_codebook(),
    ] {
        let r = structure_report(&cb).unwrap();
        assert_eq!(parse_structure_text(&structure_text(&r), p).unwrap(), r);
        let json = serde_json::to_string(&structure_json(&r)).unwrap();
        assert_eq!(parse_structure_json(&json, p).unwrap(), r);
    }
    let bad = structure_report(&common::distance_two_codebook()).unwrap();
    let text = structure_text(&bad);
    assert!(text.contains("hamming_equivalent: false"));
    assert!(text.contains("suboptimal_distance: true"));
    assert!(text.contains("note: d_min below 3"));
}

#[test]
fn hand_built_network_is_an_ml_decoder() {
    let net = common::hamming_network();
    let cb = binae::autoencoder::extract_codebook(&net);
    assert_eq!(cb, hamming74_codebook());
    let a = decoder_agreement(&cb, &NeuralDecoder::new(&net)).unwrap();
    assert_eq!(a.agree, 128);
}

#[test]
fn config_file_parsing() {
    let f = ConfigFile::parse("# comment\nk = 3 # trailing\n\nlr=0.01\np_grid = 0.02:0.06:0.02\ntrials_per_p = 50\n").unwrap();
    let cfg = f.train_config().unwrap();
    assert_eq!((cfg.k, cfg.lr, cfg.n), (3, 0.01, 7));
    let eval = f.eval_settings().unwrap();
    assert_eq!(eval.p_grid, vec![0.02, 0.04, 0.06]);
    assert_eq!(eval.trials_per_p, 50);
    for (text, needle) in [
        ("k 3\n", "key = value"),
        ("colour = red\n", "unknown key"),
        ("k = 3\nk = 4\n", "duplicate"),
    ] {
        let e = ConfigFile::parse(text).unwrap_err();
        assert!(e.to_string().contains(needle), "{e}");
        assert_eq!(e.exit_code(), 2);
    }
    let e = ConfigFile::parse("k = three\n").unwrap().train_config().unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert_eq!(parse_grid("0.01,0.5").unwrap(), vec![0.01, 0.5]);
    assert!(parse_grid("0.1:0.01:0.01").is_err());
    assert!(parse_grid("0.5,1.5").is_err());
}

fn train_args(config: Option<&Path>) -> TrainArgs {
    TrainArgs {
        config: config.map(Path::to_path_buf),
        k: None,
        n: None,
        epochs_total: None,
        epochs_continuous: None,
        batch_size: None,
        lr: None,
        mask_p_lo: None,
        mask_p_hi: None,
        train_samples: None,
        test_samples: None,
        restarts: None,
        seed: None,
        out: OutArg { out: "unused".into() },
    }
}

#[test]
fn precedence_flags_then_file_then_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    fs::write(&path, "seed = 11\nrestarts = 3\n").unwrap();
    assert_eq!(resolve_train_config(&train_args(None)).unwrap(), TrainConfig::default());
    let mut args = train_args(Some(&path));
    let from_file = resolve_train_config(&args).unwrap();
    assert_eq!((from_file.seed, from_file.restarts, from_file.k), (11, 3, 4));
    args.seed = Some(99);
    let flagged = resolve_train_config(&args).unwrap();
    assert_eq!((flagged.seed, flagged.restarts), (99, 3));
    args.epochs_continuous = Some(200);
    assert_eq!(resolve_train_config(&args).unwrap_err().exit_code(), 2);
}

#[test]
fn manifest_round_trip() {
    let cfg = TrainConfig { seed: 5, restarts: 3, lr: 9e-4, ..TrainConfig::default() };
    let eval = EvalSettings::default();
    let m = ExperimentManifest::new("train", cfg.clone(), eval.clone(), vec![("checkpoint".into(), "out/model.ckpt".into())]);
    assert_eq!(m.seeds, vec![5, 6, 7]);
    let text = m.render();
    assert!(text.contains("# tool_version: "));
    assert!(text.ends_with(&render(&cfg, &eval)));
    let back = ExperimentManifest::parse(&text, Path::new("m")).unwrap();
    assert_eq!(back, m);
    // A manifest is also a plain config file.
    assert_eq!(ConfigFile::parse(&text).unwrap().train_config().unwrap(), cfg);
}
