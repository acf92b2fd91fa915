mod common;

use std::fs;

use common::*;
use sha2::{Digest, Sha256};
use tempfile::tempdir;

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn version_names_palette() {
    let out = chromaword(["--version"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(env!("CARGO_PKG_VERSION")));
    assert!(text.contains("palette iscc-nbs-l1-approx-1"), "{text}");
}

#[test]
fn help_lists_flags() {
    let out = chromaword(["evaluate", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in [
        "--before",
        "--after",
        "--pairs",
        "--hist",
        "--out",
        "--scatter",
        "--box",
        "--top-k",
    ] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn missing_required_flag_is_usage_error() {
    assert_eq!(code(&chromaword(["train", "--hist", "x.json"])), 2);
}

#[test]
fn extract_fixture_matches_golden() {
    let dir = tempdir().unwrap();
    let out_path = dir.path().join("obs.jsonl");
    let out = chromaword([
        "extract".as_ref(),
        "--images".as_ref(),
        fixture("images").as_os_str(),
        "--out".as_ref(),
        out_path.as_os_str(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("broken.ppm"));
    let got = read(&out_path);
    assert_eq!(String::from_utf8_lossy(&got).lines().count(), 3);
    assert_eq!(got, read(&goldens().join("obs.jsonl")));
}

#[test]
fn extract_two_crops_gives_two_lines() {
    let dir = tempdir().unwrap();
    let listing = dir.path().join("two.tsv");
    fs::write(&listing, "hot.ppm\thot\ncold.ppm\tcold\n").unwrap();
    let out_path = dir.path().join("obs.jsonl");
    let out = chromaword([
        "extract".as_ref(),
        "--images".as_ref(),
        fixture("images").as_os_str(),
        "--manifest".as_ref(),
        listing.as_os_str(),
        "--out".as_ref(),
        out_path.as_os_str(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    let words: Vec<String> = text
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["word"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(words, ["hot", "cold"]);
}

#[test]
fn extract_empty_or_all_broken_fails() {
    let dir = tempdir().unwrap();
    let out_path = dir.path().join("obs.jsonl");
    let empty = dir.path().join("images.tsv");
    fs::write(&empty, "").unwrap();
    let out = chromaword([
        "extract".as_ref(),
        "--images".as_ref(),
        dir.path().as_os_str(),
        "--out".as_ref(),
        out_path.as_os_str(),
    ]);
    assert_eq!(code(&out), 4);

    let broken = dir.path().join("broken.tsv");
    fs::write(&broken, "broken.ppm\tday\nmissing.ppm\tnight\n").unwrap();
    let out = chromaword([
        "extract".as_ref(),
        "--images".as_ref(),
        fixture("images").as_os_str(),
        "--manifest".as_ref(),
        broken.as_os_str(),
        "--out".as_ref(),
        out_path.as_os_str(),
    ]);
    assert_eq!(code(&out), 4);
    assert!(!out_path.exists());
}

fn histogram_args<'a>(obs: &'a std::path::Path, out: &'a std::path::Path) -> Vec<std::ffi::OsString> {
    vec![
        "histogram".into(),
        "--observations".into(),
        obs.into(),
        "--lemmas".into(),
        fixture("lemmas.tsv").into(),
        "--stopwords".into(),
        fixture("stopwords.txt").into(),
        "--out".into(),
        out.into(),
    ]
}

fn hist_words(path: &std::path::Path) -> Vec<String> {
    let v: serde_json::Value = serde_json::from_slice(&read(path)).unwrap();
    v["words"].as_object().unwrap().keys().cloned().collect()
}

#[test]
fn min_count_one_keeps_every_word() {
    let dir = tempdir().unwrap();
    let out_path = dir.path().join("hist.json");
    let mut args = histogram_args(&fixture("observations.jsonl"), &out_path);
    args.extend(["--min-count".into(), "1".into()]);
    let out = chromaword(args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        hist_words(&out_path),
        ["chilly", "cold", "day", "glad", "happy", "hot", "love", "meet", "night", "rare", "sad", "warm"]
    );

    let out = chromaword(histogram_args(&fixture("observations.jsonl"), &out_path));
    assert_eq!(code(&out), 0);
    assert_eq!(hist_words(&out_path).len(), 10);
}

#[test]
fn strict_mode_aborts_on_malformed_line() {
    let dir = tempdir().unwrap();
    let obs = dir.path().join("obs.jsonl");
    let mut text = fs::read_to_string(fixture("observations.jsonl")).unwrap();
    text.push_str("{\"word\": \"hot\", \"fg_rgb\": [1, 2]}\n");
    fs::write(&obs, text).unwrap();
    let out_path = dir.path().join("hist.json");

    let out = chromaword(histogram_args(&obs, &out_path));
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let mut strict = histogram_args(&obs, &out_path);
    strict.push("--strict".into());
    fs::remove_file(&out_path).unwrap();
    let out = chromaword(strict);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 204"), "{}", stderr(&out));
    assert!(!out_path.exists());
}

#[test]
fn nothing_retained_is_empty_result() {
    let dir = tempdir().unwrap();
    let mut args = histogram_args(&fixture("observations.jsonl"), &dir.path().join("hist.json"));
    args.extend(["--min-count".into(), "1000".into()]);
    assert_eq!(code(&chromaword(args)), 4);
}

#[test]
fn manifest_records_digests_and_resolved_flags() {
    let dir = tempdir().unwrap();
    let out_path = dir.path().join("hist.json");
    assert_eq!(
        code(&chromaword(histogram_args(&fixture("observations.jsonl"), &out_path))),
        0
    );
    let m: serde_json::Value = serde_json::from_slice(&read(&dir.path().join("hist.json.manifest.json"))).unwrap();
    assert_eq!(m["subcommand"], "histogram");
    assert_eq!(m["palette_version"], "iscc-nbs-l1-approx-1");
    assert_eq!(m["flags"]["min_count"], 5);
    assert_eq!(
        m["flags"]["quadrants"],
        dir.path().join("quadrants.csv").to_str().unwrap()
    );
    let obs = fixture("observations.jsonl");
    let digest = hex::encode(Sha256::digest(read(&obs)));
    assert_eq!(m["inputs"][obs.to_str().unwrap()], digest);
    assert!(m["timestamp"].as_u64().unwrap() > 0);
}

fn pipeline_dir() -> tempfile::TempDir {
    let dir = tempdir().unwrap();
    let out = chromaword(histogram_args(
        &fixture("observations.jsonl"),
        &dir.path().join("hist.json"),
    ));
    assert_eq!(code(&out), 0);
    dir
}

fn train_args(dir: &std::path::Path, embeddings: &std::path::Path, extra: &[&str]) -> Vec<std::ffi::OsString> {
    let mut args: Vec<std::ffi::OsString> = vec![
        "train".into(),
        "--hist".into(),
        dir.join("hist.json").into(),
        "--embeddings".into(),
        embeddings.into(),
        "--out".into(),
        dir.join("retrained.txt").into(),
    ];
    args.extend(extra.iter().map(Into::into));
    args
}

#[test]
fn zero_epochs_reproduces_input_vectors() {
    let dir = pipeline_dir();
    let out = chromaword(train_args(dir.path(), &fixture("embeddings.txt"), &["--epochs", "0"]));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let input: std::collections::BTreeMap<_, _> = vectors(&fixture("embeddings.txt")).into_iter().collect();
    let output = vectors(&dir.path().join("retrained.txt"));
    assert_eq!(output.len(), 9);
    for (w, v) in output {
        assert_eq!(input[&w], v, "{w}");
    }
}

#[test]
fn training_is_deterministic() {
    let dir = pipeline_dir();
    let run = |dir: &std::path::Path| {
        let out = chromaword(train_args(
            dir,
            &fixture("embeddings.txt"),
            &["--epochs", "50", "--seed", "7"],
        ));
        assert_eq!(code(&out), 0);
        (read(&dir.join("retrained.txt")), read(&dir.join("trace.csv")))
    };
    let first = run(dir.path());
    assert_eq!(run(dir.path()), first);
    let trace = String::from_utf8(first.1).unwrap();
    assert!(trace.starts_with("epoch,loss\n0,"));
    assert_eq!(trace.lines().count(), 52);
}

#[test]
fn disjoint_vocabulary_is_empty_intersection() {
    let dir = pipeline_dir();
    let emb = dir.path().join("other.txt");
    fs::write(&emb, "2 3\nbook 1 0 0\ncover 0 1 0\n").unwrap();
    assert_eq!(code(&chromaword(train_args(dir.path(), &emb, &[]))), 5);
}

#[test]
fn overflowing_step_is_divergence() {
    let dir = pipeline_dir();
    let out = chromaword(train_args(
        dir.path(),
        &fixture("embeddings.txt"),
        &["--lr", "1e300", "--no-halving"],
    ));
    assert_eq!(code(&out), 6, "{}", stderr(&out));
    assert!(stderr(&out).contains("epoch 1"));
    assert!(!dir.path().join("retrained.txt").exists());
}

#[test]
fn huge_rate_with_halving_stays_finite() {
    let dir = pipeline_dir();
    let out = chromaword(train_args(
        dir.path(),
        &fixture("embeddings.txt"),
        &["--lr", "1e6", "--epochs", "20"],
    ));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let losses: Vec<f64> = trace
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(losses.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn invalid_learning_rate_is_usage_error() {
    let dir = pipeline_dir();
    assert_eq!(
        code(&chromaword(train_args(
            dir.path(),
            &fixture("embeddings.txt"),
            &["--lr", "0"]
        ))),
        2
    );
}

fn evaluate_args(dir: &std::path::Path, after: &std::path::Path, pairs: &std::path::Path) -> Vec<std::ffi::OsString> {
    vec![
        "evaluate".into(),
        "--before".into(),
        fixture("embeddings.txt").into(),
        "--after".into(),
        after.into(),
        "--pairs".into(),
        pairs.into(),
        "--hist".into(),
        dir.join("hist.json").into(),
        "--out".into(),
        dir.join("report.csv").into(),
    ]
}

#[test]
fn same_vectors_give_zero_deltas() {
    let dir = pipeline_dir();
    let out = chromaword(evaluate_args(
        dir.path(),
        &fixture("embeddings.txt"),
        &fixture("pairs.tsv"),
    ));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut reader = csv::Reader::from_path(dir.path().join("report.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 7);
    for row in rows {
        assert_eq!(&row[6], "0");
        assert_eq!(row[4], row[5]);
    }
    let summary: serde_json::Value = serde_json::from_slice(&read(&dir.path().join("summary.json"))).unwrap();
    assert_eq!(summary["skipped"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_relation_names_the_line() {
    let dir = pipeline_dir();
    let pairs = dir.path().join("pairs.tsv");
    fs::write(&pairs, "hot\twarm\tsynonym\tadj.all\nhot\tcold\topposite\tadj.all\n").unwrap();
    let out = chromaword(evaluate_args(dir.path(), &fixture("embeddings.txt"), &pairs));
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn no_surviving_pairs_fails() {
    let dir = pipeline_dir();
    let pairs = dir.path().join("pairs.tsv");
    fs::write(&pairs, "wax\twane\tantonym\tverb.change\n").unwrap();
    let out = chromaword(evaluate_args(dir.path(), &fixture("embeddings.txt"), &pairs));
    assert_eq!(code(&out), 4);
    assert!(!dir.path().join("report.csv").exists());
}
