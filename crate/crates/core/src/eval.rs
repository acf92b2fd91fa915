//! Synonym/antonym similarity before and after retraining.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::color::K;
use crate::embedding::{cosine, Embeddings};
use crate::histogram::ColorHistogram;
use crate::{Error, Position, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Synonym,
    Antonym,
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "synonym" => Ok(Relation::Synonym),
            "antonym" => Ok(Relation::Antonym),
            other => Err(format!("relation must be synonym or antonym, found {other:?}")),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Synonym => "synonym",
            Relation::Antonym => "antonym",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordPair {
    pub w1: String,
    pub w2: String,
    pub relation: Relation,
    /// Opaque category label carried into reports.
    pub lexname: String,
}

/// Parses `word1<TAB>word2<TAB>relation<TAB>lexname` lines. The lexname
/// column may be omitted. Blank lines and `#` comments are skipped.
pub fn parse_pairs_str(text: &str, input: &str) -> Result<Vec<WordPair>> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let at = Position::Line(idx + 1);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (w1, w2, relation, lexname) = match fields.as_slice() {
            [w1, w2, rel] => (w1, w2, rel, ""),
            [w1, w2, rel, lex] => (w1, w2, rel, *lex),
            _ => {
                return Err(Error::parse(
                    input,
                    at,
                    format!("expected 3 or 4 tab-separated fields, found {}", fields.len()),
                ))
            }
        };
        let relation = relation.parse().map_err(|e: String| Error::parse(input, at, e))?;
        let (w1, w2) = (w1.to_lowercase(), w2.to_lowercase());
        if w1.is_empty() || w2.is_empty() {
            return Err(Error::parse(input, at, "empty word"));
        }
        if w1 == w2 {
            return Err(Error::parse(input, at, format!("pair repeats the word {w1:?}")));
        }
        pairs.push(WordPair {
            w1,
            w2,
            relation,
            lexname: lexname.to_string(),
        });
    }
    Ok(pairs)
}

pub fn load_pairs(path: &Path) -> Result<Vec<WordPair>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pairs_str(&text, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairReport<T> {
    pub pair: WordPair,
    pub s_before: T,
    pub s_after: T,
    /// `s_after - s_before`.
    pub delta: T,
    pub hist_cosine: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", content = "word", rename_all = "snake_case")]
pub enum SkipReason {
    MissingBefore(String),
    MissingAfter(String),
    MissingHistogram(String),
    ZeroVector(String),
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::MissingBefore(w) => write!(f, "{w:?} has no vector before retraining"),
            SkipReason::MissingAfter(w) => write!(f, "{w:?} has no vector after retraining"),
            SkipReason::MissingHistogram(w) => write!(f, "{w:?} has no color histogram"),
            SkipReason::ZeroVector(w) => write!(f, "{w:?} has a zero vector"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation<T> {
    /// One report per surviving pair, in input order.
    pub reports: Vec<PairReport<T>>,
    pub skipped: Vec<(WordPair, SkipReason)>,
}

/// Cosine of two histograms; in `[0, 1]` because bins are non-negative.
pub fn histogram_cosine<T: Real>(h1: &[T; K], h2: &[T; K]) -> T {
    cosine(h1, h2).expect("normalized histograms are non-zero")
}

fn lookup<'a, T: Real>(
    emb: &'a Embeddings<T>,
    words: [&str; 2],
    missing: fn(String) -> SkipReason,
) -> std::result::Result<(&'a [T], &'a [T]), SkipReason> {
    let a = emb.get(words[0]).ok_or_else(|| missing(words[0].into()))?;
    let b = emb.get(words[1]).ok_or_else(|| missing(words[1].into()))?;
    Ok((a, b))
}

fn pair_report<T: Real>(
    pair: &WordPair,
    before: &Embeddings<T>,
    after: &Embeddings<T>,
    hists: &BTreeMap<String, ColorHistogram<T>>,
) -> std::result::Result<PairReport<T>, SkipReason> {
    let words = [pair.w1.as_str(), pair.w2.as_str()];
    let (b1, b2) = lookup(before, words, SkipReason::MissingBefore)?;
    let (a1, a2) = lookup(after, words, SkipReason::MissingAfter)?;
    let h1 = hists
        .get(words[0])
        .ok_or_else(|| SkipReason::MissingHistogram(words[0].into()))?;
    let h2 = hists
        .get(words[1])
        .ok_or_else(|| SkipReason::MissingHistogram(words[1].into()))?;

    let zero = |v: &[T], w: &str| {
        if v.iter().all(|x| x.is_zero()) {
            Err(SkipReason::ZeroVector(w.into()))
        } else {
            Ok(())
        }
    };
    zero(b1, words[0])?;
    zero(b2, words[1])?;
    zero(a1, words[0])?;
    zero(a2, words[1])?;

    let s_before = cosine(b1, b2).expect("checked non-zero");
    let s_after = cosine(a1, a2).expect("checked non-zero");
    Ok(PairReport {
        pair: pair.clone(),
        s_before,
        s_after,
        delta: s_after - s_before,
        hist_cosine: histogram_cosine(&h1.bins, &h2.bins),
    })
}

/// Similarity of each pair before and after retraining. Pairs with a word
/// missing from either vector set or from the histograms are skipped and
/// logged.
pub fn evaluate_pairs<T: Real>(
    before: &Embeddings<T>,
    after: &Embeddings<T>,
    pairs: &[WordPair],
    hists: &BTreeMap<String, ColorHistogram<T>>,
) -> Evaluation<T> {
    let mut eval = Evaluation {
        reports: Vec::new(),
        skipped: Vec::new(),
    };
    for pair in pairs {
        match pair_report(pair, before, after, hists) {
            Ok(r) => eval.reports.push(r),
            Err(reason) => {
                log::info!("skipping {} / {}: {reason}", pair.w1, pair.w2);
                eval.skipped.push((pair.clone(), reason));
            }
        }
    }
    eval
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Largest delta first.
    Increase,
    /// Smallest delta first.
    Decrease,
}

impl Direction {
    /// Synonyms are expected to grow closer, antonyms to move apart.
    pub fn expected_for(relation: Relation) -> Self {
        match relation {
            Relation::Synonym => Direction::Increase,
            Relation::Antonym => Direction::Decrease,
        }
    }
}

/// Top `k` reports of one relation ordered by delta, ties by `(w1, w2)`.
pub fn rank_pairs<T: Real>(
    reports: &[PairReport<T>],
    relation: Relation,
    direction: Direction,
    k: usize,
) -> Vec<&PairReport<T>> {
    let mut selected: Vec<&PairReport<T>> = reports.iter().filter(|r| r.pair.relation == relation).collect();
    selected.sort_by(|a, b| {
        let by_delta = a.delta.as_f64().total_cmp(&b.delta.as_f64());
        let by_delta = match direction {
            Direction::Increase => by_delta.reverse(),
            Direction::Decrease => by_delta,
        };
        by_delta.then_with(|| (&a.pair.w1, &a.pair.w2).cmp(&(&b.pair.w1, &b.pair.w2)))
    });
    selected.truncate(k);
    selected
}

/// Quantile by linear interpolation between closest ranks: position
/// `q * (n - 1)` in the sorted sample. `sorted` must be non-empty and
/// ascending.
pub fn quantile<T: Real>(sorted: &[T], q: f64) -> T {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = T::lit(pos - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

impl FiveNumber {
    pub fn of<T: Real>(values: &[T]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted: Vec<T> = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let mean = sorted.iter().copied().sum::<T>() / T::from_count(sorted.len());
        Some(FiveNumber {
            min: sorted[0].as_f64(),
            q1: quantile(&sorted, 0.25).as_f64(),
            median: quantile(&sorted, 0.5).as_f64(),
            q3: quantile(&sorted, 0.75).as_f64(),
            max: sorted[sorted.len() - 1].as_f64(),
            mean: mean.as_f64(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelationSummary {
    pub pairs: usize,
    pub before: FiveNumber,
    pub after: FiveNumber,
}

/// Box-plot statistics per relation; `None` where a relation has no pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub synonym: Option<RelationSummary>,
    pub antonym: Option<RelationSummary>,
}

impl DistributionSummary {
    pub fn get(&self, relation: Relation) -> Option<&RelationSummary> {
        match relation {
            Relation::Synonym => self.synonym.as_ref(),
            Relation::Antonym => self.antonym.as_ref(),
        }
    }
}

pub fn summarize_distribution<T: Real>(reports: &[PairReport<T>]) -> DistributionSummary {
    let summarize = |relation: Relation| {
        let (before, after): (Vec<T>, Vec<T>) = reports
            .iter()
            .filter(|r| r.pair.relation == relation)
            .map(|r| (r.s_before, r.s_after))
            .unzip();
        if before.is_empty() {
            log::info!("no surviving {relation} pairs to summarize");
            return None;
        }
        Some(RelationSummary {
            pairs: before.len(),
            before: FiveNumber::of(&before)?,
            after: FiveNumber::of(&after)?,
        })
    };
    DistributionSummary {
        synonym: summarize(Relation::Synonym),
        antonym: summarize(Relation::Antonym),
    }
}

/// Writes `word1,word2,relation,lexname,s_before,s_after,delta,hist_cosine`.
pub fn write_report_csv<T: Real, W: Write>(reports: &[PairReport<T>], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "word1",
        "word2",
        "relation",
        "lexname",
        "s_before",
        "s_after",
        "delta",
        "hist_cosine",
    ])?;
    for r in reports {
        w.write_record([
            r.pair.w1.clone(),
            r.pair.w2.clone(),
            r.pair.relation.to_string(),
            r.pair.lexname.clone(),
            r.s_before.to_string(),
            r.s_after.to_string(),
            r.delta.to_string(),
            r.hist_cosine.to_string(),
        ])?;
    }
    w.flush()
}

/// Writes a ranked table: `rank,relation,word1,word2,lexname,delta`.
pub fn write_ranking_csv<T: Real, W: Write>(tables: &[(Relation, Vec<&PairReport<T>>)], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "relation", "word1", "word2", "lexname", "delta"])?;
    for (relation, rows) in tables {
        for (i, r) in rows.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                relation.to_string(),
                r.pair.w1.clone(),
                r.pair.w2.clone(),
                r.pair.lexname.clone(),
                r.delta.to_string(),
            ])?;
        }
    }
    w.flush()
}
