//! Observation records, token normalization and per-word grouping.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::color::{srgb_to_lab, LabColor, SrgbColor};
use crate::{Error, Position, Real, Result};

/// One word image: the recognized token with its character and background
/// colors.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation<T> {
    pub word: String,
    pub fg: LabColor<T>,
    pub bg: LabColor<T>,
    pub source: Option<String>,
}

/// Surface form to lemma. Every lemma maps to itself.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaMap {
    map: HashMap<String, String>,
}

impl LemmaMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a map from `(surface, lemma)` pairs, lowercasing both sides.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut map = HashMap::new();
        for (surface, lemma) in pairs {
            let (surface, lemma) = (surface.as_ref().to_lowercase(), lemma.as_ref().to_lowercase());
            if surface.is_empty() || lemma.is_empty() {
                return Err(Error::InvalidLemmaMap("empty surface form or lemma".into()));
            }
            if surface != lemma {
                map.insert(surface, lemma);
            }
        }
        for (surface, lemma) in &map {
            if let Some(next) = map.get(lemma) {
                return Err(Error::InvalidLemmaMap(format!(
                    "{surface:?} maps to {lemma:?}, which itself maps to {next:?}"
                )));
            }
        }
        Ok(LemmaMap { map })
    }

    /// Parses `surface<TAB>lemma` lines. Blank lines and `#` comments are
    /// skipped.
    pub fn from_tsv_str(text: &str, input: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split('\t').collect::<Vec<_>>().as_slice() {
                [surface, lemma] => pairs.push((surface.trim(), lemma.trim())),
                fields => {
                    return Err(Error::parse(
                        input,
                        Position::Line(idx + 1),
                        format!("expected surface<TAB>lemma, found {} fields", fields.len()),
                    ))
                }
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv_str(&text, &path.display().to_string())
    }

    pub fn lemmatize<'a>(&'a self, word: &'a str) -> &'a str {
        self.map.get(word).map(String::as_str).unwrap_or(word)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Stopwords(
            words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty() && !w.starts_with('#'))
                .collect(),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_words(text.lines()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rejection {
    Stopword,
    Digit,
    Compound,
    Empty,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::Stopword => "stopword",
            Rejection::Digit => "digit",
            Rejection::Compound => "compound",
            Rejection::Empty => "empty",
        })
    }
}

/// Lemma map plus stopword list applied to raw recognized tokens.
#[derive(Clone, Debug, Default)]
pub struct TokenFilter {
    pub lemmas: LemmaMap,
    pub stopwords: Stopwords,
}

impl TokenFilter {
    pub fn new(lemmas: LemmaMap, stopwords: Stopwords) -> Self {
        TokenFilter { lemmas, stopwords }
    }

    /// Lowercases and lemmatizes `raw`. Tokens with digits or any other
    /// non-alphabetic character (hyphenated and apostrophe compounds) are
    /// rejected, as are stopwords in either surface or lemma form.
    pub fn normalize(&self, raw: &str) -> std::result::Result<String, Rejection> {
        let lower = raw.trim().to_lowercase();
        if lower.is_empty() {
            return Err(Rejection::Empty);
        }
        if lower.chars().any(|c| c.is_numeric()) {
            return Err(Rejection::Digit);
        }
        if !lower.chars().all(char::is_alphabetic) {
            return Err(Rejection::Compound);
        }
        let lemma = self.lemmas.lemmatize(&lower);
        if self.stopwords.contains(&lower) || self.stopwords.contains(lemma) {
            return Err(Rejection::Stopword);
        }
        Ok(lemma.to_string())
    }
}

#[derive(Debug, Deserialize)]
struct Record {
    word: String,
    fg_rgb: Option<[u8; 3]>,
    bg_rgb: Option<[u8; 3]>,
    fg_lab: Option<[f64; 3]>,
    bg_lab: Option<[f64; 3]>,
    source: Option<String>,
}

fn pick_color<T: Real>(
    rgb: Option<[u8; 3]>,
    lab: Option<[f64; 3]>,
    side: &str,
) -> std::result::Result<LabColor<T>, String> {
    match (rgb, lab) {
        (Some([r, g, b]), None) => Ok(srgb_to_lab(SrgbColor::new(r, g, b))),
        (None, Some(lab)) => {
            if lab.iter().any(|v| !v.is_finite()) {
                return Err(format!("{side}_lab has a non-finite component"));
            }
            Ok(LabColor::from_array(lab.map(T::lit)))
        }
        (Some(_), Some(_)) => Err(format!("both {side}_rgb and {side}_lab given")),
        (None, None) => Err(format!("missing {side}_rgb or {side}_lab")),
    }
}

/// Parses one JSONL record.
pub fn parse_observation_line<T: Real>(line: &str) -> std::result::Result<Observation<T>, String> {
    let rec: Record = serde_json::from_str(line).map_err(|e| e.to_string())?;
    Ok(Observation {
        fg: pick_color(rec.fg_rgb, rec.fg_lab, "fg")?,
        bg: pick_color(rec.bg_rgb, rec.bg_lab, "bg")?,
        word: rec.word,
        source: rec.source,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct ParsedObservations<T> {
    pub observations: Vec<Observation<T>>,
    /// 1-based source line of each entry in `observations`.
    pub lines: Vec<usize>,
    /// Malformed lines skipped in lenient mode.
    pub skipped: Vec<LineError>,
}

/// Parses observation JSONL text. In strict mode the first malformed line
/// aborts with [`Error::Parse`]; otherwise it is recorded in `skipped`.
/// Blank lines are ignored.
pub fn parse_observations_str<T: Real>(text: &str, input: &str, strict: bool) -> Result<ParsedObservations<T>> {
    let mut out = ParsedObservations {
        observations: Vec::new(),
        lines: Vec::new(),
        skipped: Vec::new(),
    };
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_observation_line(line) {
            Ok(obs) => {
                out.observations.push(obs);
                out.lines.push(idx + 1);
            }
            Err(reason) if strict => return Err(Error::parse(input, Position::Line(idx + 1), reason)),
            Err(reason) => {
                log::warn!("{input}: line {}: {reason}", idx + 1);
                out.skipped.push(LineError { line: idx + 1, reason });
            }
        }
    }
    Ok(out)
}

pub fn parse_observations<T: Real>(path: &Path, strict: bool) -> Result<ParsedObservations<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_observations_str(&text, &path.display().to_string(), strict)
}

/// Observations grouped by normalized word, in lexicographic word order.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus<T> {
    words: BTreeMap<String, Vec<Observation<T>>>,
    rejected: BTreeMap<Rejection, usize>,
}

impl<T: Real> Corpus<T> {
    pub fn words(&self) -> &BTreeMap<String, Vec<Observation<T>>> {
        &self.words
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.words.keys().map(String::as_str)
    }

    pub fn observation_count(&self) -> usize {
        self.words.values().map(Vec::len).sum()
    }

    /// Rejected token counts per reason.
    pub fn rejected(&self) -> &BTreeMap<Rejection, usize> {
        &self.rejected
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn observation_order<T: Real>(a: &Observation<T>, b: &Observation<T>) -> std::cmp::Ordering {
    a.fg.total_cmp(&b.fg)
        .then_with(|| a.bg.total_cmp(&b.bg))
        .then_with(|| a.source.cmp(&b.source))
}

/// Normalizes every observation's word and groups the survivors. The result
/// does not depend on input order: each word's observations are sorted by
/// color and source.
pub fn build_corpus<T: Real>(
    observations: impl IntoIterator<Item = Observation<T>>,
    filter: &TokenFilter,
) -> Corpus<T> {
    let mut words: BTreeMap<String, Vec<Observation<T>>> = BTreeMap::new();
    let mut rejected = BTreeMap::new();
    for mut obs in observations {
        match filter.normalize(&obs.word) {
            Ok(word) => {
                obs.word = word.clone();
                words.entry(word).or_default().push(obs);
            }
            Err(reason) => *rejected.entry(reason).or_insert(0) += 1,
        }
    }
    for list in words.values_mut() {
        list.sort_by(observation_order);
    }
    Corpus { words, rejected }
}
