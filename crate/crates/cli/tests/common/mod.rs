#![allow(dead_code)]

use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

pub fn goldens() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Outputs of a full fixture run that are compared byte for byte.
pub const PIPELINE_OUTPUTS: [&str; 10] = [
    "hist.json",
    "quadrants.csv",
    "scatter.svg",
    "retrained.txt",
    "trace.csv",
    "report.csv",
    "pairs.svg",
    "box.svg",
    "summary.json",
    "top_pairs.csv",
];

pub fn chromaword<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_chromaword"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn check(out: Output, step: &str) -> Result<(), String> {
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{step} failed ({}): {}", out.status, stderr(&out)))
    }
}

/// histogram, train and evaluate on the fixture corpus, writing into `dir`.
pub fn run_pipeline(dir: &Path, epochs: usize) -> Result<(), String> {
    let fx = fixtures();
    let d = |name: &str| dir.join(name);
    check(
        chromaword([
            OsStr::new("histogram"),
            "--observations".as_ref(),
            fx.join("observations.jsonl").as_os_str(),
            "--lemmas".as_ref(),
            fx.join("lemmas.tsv").as_os_str(),
            "--stopwords".as_ref(),
            fx.join("stopwords.txt").as_os_str(),
            "--out".as_ref(),
            d("hist.json").as_os_str(),
        ]),
        "histogram",
    )?;
    let epochs = epochs.to_string();
    check(
        chromaword([
            OsStr::new("train"),
            "--hist".as_ref(),
            d("hist.json").as_os_str(),
            "--embeddings".as_ref(),
            fx.join("embeddings.txt").as_os_str(),
            "--epochs".as_ref(),
            epochs.as_ref(),
            "--out".as_ref(),
            d("retrained.txt").as_os_str(),
        ]),
        "train",
    )?;
    check(
        chromaword([
            OsStr::new("evaluate"),
            "--before".as_ref(),
            fx.join("embeddings.txt").as_os_str(),
            "--after".as_ref(),
            d("retrained.txt").as_os_str(),
            "--pairs".as_ref(),
            fx.join("pairs.tsv").as_os_str(),
            "--hist".as_ref(),
            d("hist.json").as_os_str(),
            "--out".as_ref(),
            d("report.csv").as_os_str(),
        ]),
        "evaluate",
    )
}

pub fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Parses word2vec text into `(word, values)` rows.
pub fn vectors(path: &Path) -> Vec<(String, Vec<f64>)> {
    let text = String::from_utf8(read(path)).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(' ');
            let w = it.next().unwrap().to_string();
            (w, it.map(|x| x.parse().unwrap()).collect())
        })
        .collect()
}

/// `(cx, cy)` attribute strings of every `<circle` element.
pub fn circle_centers(svg: &str) -> Vec<(String, String)> {
    let attr = |tag: &str, name: &str| {
        let start = tag.find(&format!(" {name}=\"")).expect("attribute present") + name.len() + 3;
        let len = tag[start..].find('"').unwrap();
        tag[start..start + len].to_string()
    };
    svg.split("<circle")
        .skip(1)
        .map(|rest| {
            let tag = &rest[..rest.find('>').unwrap()];
            (attr(tag, "cx"), attr(tag, "cy"))
        })
        .collect()
}
