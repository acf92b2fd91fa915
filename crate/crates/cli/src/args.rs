use std::path::PathBuf;
use std::sync::LazyLock;

use chromaword::embedding::LossKind;
use chromaword::histogram::DEFAULT_MIN_COUNT;
use chromaword::imaging::FgClass;
use chromaword::Palette;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub static VERSION: LazyLock<String> = LazyLock::new(|| {
    let palette = Palette::bundled();
    format!(
        "{} (palette {})",
        env!("CARGO_PKG_VERSION"),
        palette.version().unwrap_or("unversioned")
    )
});

/// Color-aware word embeddings from word images.
#[derive(Debug, Parser)]
#[command(name = "chromaword", version = VERSION.as_str())]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Measure character and background colors of word-image crops.
    Extract(ExtractArgs),
    /// Build per-word color histograms and particularity statistics.
    Histogram(HistogramArgs),
    /// Retrain pretrained word vectors against the color histograms.
    Train(TrainArgs),
    /// Compare pair similarities before and after retraining.
    Evaluate(EvaluateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Extract(_) => "extract",
            Command::Histogram(_) => "histogram",
            Command::Train(_) => "train",
            Command::Evaluate(_) => "evaluate",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtractArgs {
    /// Directory holding the PPM crops.
    #[arg(long)]
    pub images: PathBuf,
    /// `path<TAB>word` lines, paths relative to --images [default: IMAGES/images.tsv]
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Observation JSONL output.
    #[arg(long)]
    pub out: PathBuf,
    /// Which Otsu class holds the characters: smaller, darker or lighter.
    #[arg(long, default_value_t = FgClass::Smaller)]
    #[serde(serialize_with = "display")]
    pub fg_class: FgClass,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HistogramArgs {
    /// Observation JSONL.
    #[arg(long)]
    pub observations: PathBuf,
    /// `surface<TAB>lemma` TSV.
    #[arg(long)]
    pub lemmas: PathBuf,
    /// One stopword per line.
    #[arg(long)]
    pub stopwords: PathBuf,
    /// Words with fewer retained observations are excluded.
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    pub min_count: usize,
    /// Basic-color palette TSV [default: bundled]
    #[arg(long)]
    pub palette: Option<PathBuf>,
    /// Histogram JSON output.
    #[arg(long)]
    pub out: PathBuf,
    /// Particularity CSV [default: quadrants.csv next to --out]
    #[arg(long)]
    pub quadrants: Option<PathBuf>,
    /// Variance/deviation scatter plot [default: scatter.svg next to --out]
    #[arg(long)]
    pub scatter: Option<PathBuf>,
    /// Abort on the first malformed observation line.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    /// Histogram JSON from `histogram`.
    #[arg(long)]
    pub hist: PathBuf,
    /// Pretrained vectors in word2vec text format.
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// squared or euclidean.
    #[arg(long, default_value_t = LossKind::Squared)]
    #[serde(serialize_with = "display")]
    pub loss: LossKind,
    /// Output weights start uniform in [-s, s].
    #[arg(long, default_value_t = 0.1)]
    pub init_scale: f64,
    /// Keep the learning rate fixed even when a step increases the loss.
    #[arg(long)]
    pub no_halving: bool,
    /// Update only the output weights.
    #[arg(long)]
    pub freeze_input: bool,
    /// Retrained vectors in word2vec text format.
    #[arg(long)]
    pub out: PathBuf,
    /// Loss per epoch [default: trace.csv next to --out]
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    /// Vectors before retraining.
    #[arg(long)]
    pub before: PathBuf,
    /// Vectors after retraining.
    #[arg(long)]
    pub after: PathBuf,
    /// `word1<TAB>word2<TAB>relation<TAB>lexname` TSV.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Histogram JSON from `histogram`.
    #[arg(long)]
    pub hist: PathBuf,
    /// Per-pair report CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Before/after scatter plot [default: pairs.svg next to --out]
    #[arg(long)]
    pub scatter: Option<PathBuf>,
    /// Box plots [default: box.svg next to --out]
    #[arg(long = "box")]
    pub box_plot: Option<PathBuf>,
    /// Distribution summary and skip log [default: summary.json next to --out]
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Top-k tables per relation [default: top_pairs.csv next to --out]
    #[arg(long)]
    pub top: Option<PathBuf>,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub top_k: u64,
}

fn display<S: serde::Serializer, D: std::fmt::Display>(v: &D, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn or_sibling(slot: &mut Option<PathBuf>, anchor: &std::path::Path, name: &str) {
    if slot.is_none() {
        *slot = Some(anchor.with_file_name(name));
    }
}

impl Command {
    /// Fills every defaulted path so the run record names the files
    /// actually read and written.
    pub fn resolved(&self) -> Command {
        let mut c = self.clone();
        match &mut c {
            Command::Extract(a) => {
                if a.manifest.is_none() {
                    a.manifest = Some(a.images.join("images.tsv"));
                }
            }
            Command::Histogram(a) => {
                or_sibling(&mut a.quadrants, &a.out, "quadrants.csv");
                or_sibling(&mut a.scatter, &a.out, "scatter.svg");
            }
            Command::Train(a) => or_sibling(&mut a.trace, &a.out, "trace.csv"),
            Command::Evaluate(a) => {
                or_sibling(&mut a.scatter, &a.out, "pairs.svg");
                or_sibling(&mut a.box_plot, &a.out, "box.svg");
                or_sibling(&mut a.summary, &a.out, "summary.json");
                or_sibling(&mut a.top, &a.out, "top_pairs.csv");
            }
        }
        c
    }
}
