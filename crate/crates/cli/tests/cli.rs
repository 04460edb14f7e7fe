use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn xfsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xfsa")).args(args).output().expect("binary runs")
}

fn fixture(dir: &Path) -> String {
    let out = xfsa(&["fixture", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("config.toml").to_string_lossy().into_owned()
}

const COMPARED: [&str; 13] = [
    "keywords.csv",
    "labels.csv",
    "scores.csv",
    "cells.csv",
    "granger.csv",
    "heatmap_r_fp.csv",
    "heatmap_r_fn.csv",
    "heatmap_r_nfp.csv",
    "heatmap_r_nfn.csv",
    "heatmap_u_fp.csv",
    "heatmap_u_fn.csv",
    "heatmap_u_nfp.csv",
    "heatmap_u_nfn.csv",
];

#[test]
fn run_equals_stage_composition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path());
    let whole = dir.path().join("whole");
    let staged = dir.path().join("staged");
    let (w, s) = (whole.to_str().unwrap(), staged.to_str().unwrap());

    let out = xfsa(&["run", "-c", &cfg, "--output-dir", w]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for stage in ["keywords", "label", "score", "analyze", "report"] {
        let out = xfsa(&[stage, "-c", &cfg, "--output-dir", s]);
        assert!(out.status.success(), "{stage}: {}", String::from_utf8_lossy(&out.stderr));
    }
    for name in COMPARED {
        let a = fs::read(whole.join(name)).unwrap();
        let b = fs::read(staged.join(name)).unwrap();
        assert!(a == b, "{name} differs between run and staged execution");
    }
    assert!(whole.join("run_manifest.json").is_file());

    let granger = fs::read_to_string(whole.join("granger.csv")).unwrap();
    assert!(granger.lines().any(|l| l.starts_with("NEE,inflation,fp,")), "{granger}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(xfsa(&["run", "-c", &cfg, "--output-dir", a.to_str().unwrap()]).status.success());
    assert!(xfsa(&["run", "-c", &cfg, "--output-dir", b.to_str().unwrap()]).status.success());
    for name in COMPARED.iter().chain(["run_manifest.json"].iter()) {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn flag_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path());
    let out_dir = dir.path().join("small");
    let out = xfsa(&["run", "-c", &cfg, "--output-dir", out_dir.to_str().unwrap(), "--top-n", "5", "--entropy-k", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let heat = fs::read_to_string(out_dir.join("heatmap_r_fp.csv")).unwrap();
    assert_eq!(heat.lines().count(), 6);
    let manifest = fs::read_to_string(out_dir.join("run_manifest.json")).unwrap();
    assert!(manifest.contains("\"entropy_k\": 4"), "{manifest}");
    assert!(!manifest.contains(out_dir.to_str().unwrap()));
}

#[test]
fn missing_price_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path());
    fs::remove_file(dir.path().join("prices").join("BP.csv")).unwrap();
    let out = xfsa(&["run", "-c", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("BP.csv"), "{err}");
}

#[test]
fn out_of_range_override_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path());
    let out = xfsa(&["analyze", "-c", &cfg, "--granger-alpha", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("analyze.granger_alpha"));
}

#[test]
fn malformed_tweet_file_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture(dir.path());
    fs::write(dir.path().join("tweets.jsonl"), "not json\n{\"id\": 1}\n").unwrap();
    let out = xfsa(&["run", "-c", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_config_keys() {
    let out = xfsa(&["--help"]);
    assert!(out.status.success());
    let help = String::from_utf8_lossy(&out.stdout);
    for key in [
        "tweets",
        "labels",
        "aspects",
        "positive_terms",
        "negative_terms",
        "calendar",
        "ticker",
        "min_keyword_count",
        "max_malformed_fraction",
        "window",
        "top_n",
        "absent_as_zero",
        "lag",
        "pearson_threshold",
        "granger_lag",
        "granger_alpha",
        "granger_direction",
        "difference",
        "entropy_k",
        "dir",
        "seed",
    ] {
        assert!(help.contains(key), "--help is missing {key}");
    }
    assert_eq!(xfsa(&["run"]).status.code(), Some(1));
}
