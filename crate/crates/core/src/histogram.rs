//! Per-word basic-color histograms and color-usage particularity.
//!
//! A word's histogram counts the quantized foreground colors of its
//! observations and is normalized to sum to one. Two rules thin the data
//! first:
//!
//! * an observation with achromatic characters on a chromatic background is
//!   dropped, since there the background carries the color;
//! * words with fewer than `min_count` surviving observations get no
//!   histogram.
//!
//! Particularity is read off two statistics: the variance of the bins around
//! the uniform level `1/K`, and the Euclidean distance from the mean
//! histogram of the vocabulary. Splitting both axes at their vocabulary mean
//! gives four quadrants; quadrant 1 (high on both) holds the words with the
//! most particular color usage.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::color::{Palette, K};
use crate::corpus::{Corpus, Observation};
use crate::{Error, Real, Result};

pub const DEFAULT_MIN_COUNT: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct ColorHistogram<T> {
    pub bins: [T; K],
    /// Observations that voted, after the drop rule.
    pub count: usize,
}

impl<T: Real> ColorHistogram<T> {
    /// Normalizes raw bin votes. Panics if all votes are zero.
    pub fn from_votes(votes: [usize; K]) -> Self {
        let count: usize = votes.iter().sum();
        assert!(count > 0, "histogram needs at least one vote");
        let total = T::from_count(count);
        ColorHistogram {
            bins: votes.map(|v| T::from_count(v) / total),
            count,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropDecision {
    Keep,
    Drop,
}

/// Drops an observation whose characters are achromatic while its background
/// is chromatic. Achromatic on achromatic is kept.
pub fn apply_drop_rule<T: Real>(obs: &Observation<T>, palette: &Palette<T>) -> DropDecision {
    let fg = palette.quantize(obs.fg);
    let bg = palette.quantize(obs.bg);
    if palette.is_achromatic(fg) && !palette.is_achromatic(bg) {
        DropDecision::Drop
    } else {
        DropDecision::Keep
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramSet<T> {
    pub min_count: usize,
    pub words: BTreeMap<String, ColorHistogram<T>>,
    /// Componentwise mean over the retained words.
    pub mean: [T; K],
    /// Observations removed by the drop rule.
    pub dropped_observations: usize,
    /// Words below `min_count`, with their post-drop counts.
    pub excluded: BTreeMap<String, usize>,
}

/// Applies the drop rule per observation, then the `min_count` threshold to
/// the surviving counts, then normalizes.
pub fn build_histograms<T: Real>(
    corpus: &Corpus<T>,
    palette: &Palette<T>,
    min_count: usize,
) -> Result<HistogramSet<T>> {
    if min_count == 0 {
        return Err(Error::InvalidConfig("min_count must be at least 1".into()));
    }
    let mut words = BTreeMap::new();
    let mut excluded = BTreeMap::new();
    let mut dropped_observations = 0;
    for (word, observations) in corpus.words() {
        let mut votes = [0usize; K];
        for obs in observations {
            match apply_drop_rule(obs, palette) {
                DropDecision::Keep => votes[palette.quantize(obs.fg)] += 1,
                DropDecision::Drop => dropped_observations += 1,
            }
        }
        let count: usize = votes.iter().sum();
        if count < min_count {
            excluded.insert(word.clone(), count);
        } else {
            words.insert(word.clone(), ColorHistogram::from_votes(votes));
        }
    }
    if words.is_empty() {
        return Err(Error::EmptyResult);
    }
    let mean = mean_histogram(words.values().map(|h| &h.bins));
    Ok(HistogramSet {
        min_count,
        words,
        mean,
        dropped_observations,
        excluded,
    })
}

/// Componentwise average. Panics on an empty input.
pub fn mean_histogram<'a, T: Real>(hists: impl IntoIterator<Item = &'a [T; K]>) -> [T; K] {
    let mut acc = [T::zero(); K];
    let mut n = 0usize;
    for h in hists {
        for (a, &v) in acc.iter_mut().zip(h) {
            *a += v;
        }
        n += 1;
    }
    assert!(n > 0, "mean of no histograms");
    let n = T::from_count(n);
    acc.map(|a| a / n)
}

/// Mean squared deviation of the bins from the uniform level `1/K`.
/// Ranges from 0 (uniform) to `(K-1)/K^2` (one-hot).
pub fn variance<T: Real>(bins: &[T; K]) -> T {
    let k = T::from_count(K);
    bins.iter().map(|&h| (k * h - T::one()).powi(2)).sum::<T>() / (k * k * k)
}

/// Euclidean distance from the mean histogram.
pub fn deviation<T: Real>(bins: &[T; K], mean: &[T; K]) -> T {
    bins.iter()
        .zip(mean)
        .map(|(&h, &m)| (h - m) * (h - m))
        .sum::<T>()
        .sqrt()
}

/// Most frequent bin; the lowest index wins a tie.
pub fn dominant_color<T: Real>(bins: &[T; K]) -> usize {
    let mut best = 0;
    for (i, &v) in bins.iter().enumerate().skip(1) {
        if v > bins[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quadrant {
    /// Variance and deviation both at or above their means.
    First = 1,
    /// Deviation at or above its mean, variance below.
    Second = 2,
    /// Both below.
    Third = 3,
    /// Variance at or above its mean, deviation below.
    Fourth = 4,
}

impl Quadrant {
    pub fn classify<T: Real>(variance: T, deviation: T, thresholds: Thresholds<T>) -> Quadrant {
        match (variance >= thresholds.variance, deviation >= thresholds.deviation) {
            (true, true) => Quadrant::First,
            (false, true) => Quadrant::Second,
            (false, false) => Quadrant::Third,
            (true, false) => Quadrant::Fourth,
        }
    }

    pub fn number(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds<T> {
    pub variance: T,
    pub deviation: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticularityStats<T> {
    pub variance: T,
    pub deviation: T,
    pub quadrant: Quadrant,
    pub score: T,
}

pub fn particularity_score<T: Real>(variance: T, deviation: T) -> T {
    variance * deviation
}

/// Splits `(variance, deviation)` points at the mean of each axis. Panics on
/// an empty input.
pub fn classify_quadrants<T: Real>(points: &[(T, T)]) -> (Thresholds<T>, Vec<Quadrant>) {
    assert!(!points.is_empty(), "quadrant split needs at least one word");
    let n = T::from_count(points.len());
    let thresholds = Thresholds {
        variance: points.iter().map(|p| p.0).sum::<T>() / n,
        deviation: points.iter().map(|p| p.1).sum::<T>() / n,
    };
    let quadrants = points
        .iter()
        .map(|&(v, d)| Quadrant::classify(v, d, thresholds))
        .collect();
    (thresholds, quadrants)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordParticularity<T> {
    pub word: String,
    pub count: usize,
    pub stats: ParticularityStats<T>,
    pub dominant: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParticularityReport<T> {
    pub thresholds: Thresholds<T>,
    /// One row per retained word, in vocabulary order.
    pub rows: Vec<WordParticularity<T>>,
}

impl<T: Real> ParticularityReport<T> {
    pub fn quadrant_sizes(&self) -> [usize; 4] {
        let mut sizes = [0; 4];
        for row in &self.rows {
            sizes[usize::from(row.stats.quadrant.number()) - 1] += 1;
        }
        sizes
    }
}

pub fn analyze<T: Real>(set: &HistogramSet<T>) -> ParticularityReport<T> {
    let points: Vec<(T, T)> = set
        .words
        .values()
        .map(|h| (variance(&h.bins), deviation(&h.bins, &set.mean)))
        .collect();
    let (thresholds, quadrants) = classify_quadrants(&points);
    let rows = set
        .words
        .iter()
        .zip(points)
        .zip(quadrants)
        .map(|(((word, h), (variance, deviation)), quadrant)| WordParticularity {
            word: word.clone(),
            count: h.count,
            stats: ParticularityStats {
                variance,
                deviation,
                quadrant,
                score: particularity_score(variance, deviation),
            },
            dominant: dominant_color(&h.bins),
        })
        .collect();
    ParticularityReport { thresholds, rows }
}

/// On-disk form of a [`HistogramSet`] (`hist.json`).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HistFile {
    pub k: usize,
    pub colors: Vec<String>,
    pub min_count: usize,
    pub words: BTreeMap<String, HistFileEntry>,
    pub mean: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HistFileEntry {
    pub count: usize,
    pub bins: Vec<f64>,
}

impl HistFile {
    pub fn from_set<T: Real>(set: &HistogramSet<T>, palette: &Palette<T>) -> Self {
        HistFile {
            k: K,
            colors: palette.names().iter().map(|s| s.to_string()).collect(),
            min_count: set.min_count,
            words: set
                .words
                .iter()
                .map(|(w, h)| {
                    (
                        w.clone(),
                        HistFileEntry {
                            count: h.count,
                            bins: h.bins.iter().map(|b| b.as_f64()).collect(),
                        },
                    )
                })
                .collect(),
            mean: set.mean.iter().map(|b| b.as_f64()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("histogram file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, input: &str) -> Result<Self> {
        let file: HistFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(input, crate::Position::Line(e.line()), e.to_string()))?;
        let bad = |reason: String| Error::parse(input, crate::Position::Line(1), reason);
        if file.k != K || file.colors.len() != K || file.mean.len() != K {
            return Err(bad(format!("expected k = {K} bins")));
        }
        for (word, entry) in &file.words {
            if entry.bins.len() != K {
                return Err(bad(format!("{word:?} has {} bins", entry.bins.len())));
            }
            if entry.bins.iter().any(|b| !b.is_finite() || *b < 0.0) {
                return Err(bad(format!("{word:?} has a negative or non-finite bin")));
            }
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Word histograms converted to the working scalar.
    pub fn histograms<T: Real>(&self) -> BTreeMap<String, ColorHistogram<T>> {
        self.words
            .iter()
            .map(|(w, e)| {
                let mut bins = [T::zero(); K];
                for (b, &v) in bins.iter_mut().zip(&e.bins) {
                    *b = T::lit(v);
                }
                (w.clone(), ColorHistogram { bins, count: e.count })
            })
            .collect()
    }
}

/// Writes `word,count,variance,deviation,quadrant,score,dominant_color`.
pub fn write_quadrants_csv<T: Real, W: Write>(
    report: &ParticularityReport<T>,
    palette: &Palette<T>,
    out: W,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "word",
        "count",
        "variance",
        "deviation",
        "quadrant",
        "score",
        "dominant_color",
    ])?;
    for row in &report.rows {
        w.write_record([
            row.word.clone(),
            row.count.to_string(),
            row.stats.variance.to_string(),
            row.stats.deviation.to_string(),
            row.stats.quadrant.to_string(),
            row.stats.score.to_string(),
            palette.names()[row.dominant].to_string(),
        ])?;
    }
    w.flush()
}
