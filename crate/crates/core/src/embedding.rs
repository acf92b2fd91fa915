//! Retraining pretrained word vectors against color histograms.
//!
//! The network maps a one-hot word selector through the embedding matrix
//! `w_in` (N x V, one column per word) and a readout `w_out` (K x N) into a
//! softmax over the K basic colors, and is trained so that this prediction
//! matches the word's color histogram:
//!
//! ```text
//! L = sum_w || h_w - softmax(w_out * w_in[:, w]) ||      (euclidean)
//! L = sum_w || h_w - softmax(w_out * w_in[:, w]) ||^2    (squared)
//! ```
//!
//! `w_in` starts from pretrained vectors and `w_out` from small seeded
//! uniform noise. Both are updated by full-batch gradient descent. Words whose
//! histograms differ are pushed towards hidden vectors that the shared readout
//! can tell apart, which is what moves pair similarities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1};
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::color::K;
use crate::histogram::ColorHistogram;
use crate::{Error, Position, Real, Result};

/// Pretrained (or retrained) vectors keyed by word.
#[derive(Clone, Debug, PartialEq)]
pub struct Embeddings<T> {
    dim: usize,
    vectors: BTreeMap<String, Vec<T>>,
}

impl<T: Real> Embeddings<T> {
    /// Panics if a vector's length differs from `dim`.
    pub fn new(dim: usize, vectors: BTreeMap<String, Vec<T>>) -> Self {
        assert!(vectors.values().all(|v| v.len() == dim), "vector dimension mismatch");
        Embeddings { dim, vectors }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[T])> {
        self.vectors.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }

    /// Writes word2vec text format, words in lexicographic order.
    pub fn write_word2vec_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.vectors.len(), self.dim)?;
        for (word, v) in &self.vectors {
            write!(out, "{word}")?;
            for x in v {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LoadedEmbeddings<T> {
    pub embeddings: Embeddings<T>,
    /// Words that appeared more than once; the last row won.
    pub duplicates: Vec<String>,
}

/// Reads word2vec text format: a `V N` header, then `word v1 ... vN` rows.
/// A repeated word keeps its last row and is reported in `duplicates`.
pub fn read_word2vec_text<T: Real, R: BufRead>(reader: R, input: &str) -> Result<LoadedEmbeddings<T>> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line.map_err(|e| Error::io(input, e))?;
                if !line.trim().is_empty() {
                    break (idx + 1, line);
                }
            }
            None => return Err(Error::parse(input, Position::Line(1), "missing \"V N\" header")),
        }
    };
    let fields: Vec<&str> = header.1.split_whitespace().collect();
    let (declared, dim) = match fields.as_slice() {
        [v, n] => match (v.parse::<usize>(), n.parse::<usize>()) {
            (Ok(v), Ok(n)) if n > 0 => (v, n),
            _ => {
                return Err(Error::parse(
                    input,
                    Position::Line(header.0),
                    "header must be two positive integers \"V N\"",
                ))
            }
        },
        _ => return Err(Error::parse(input, Position::Line(header.0), "header must be \"V N\"")),
    };

    let mut vectors = BTreeMap::new();
    let mut duplicates = BTreeSet::new();
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(input, e))?;
        let mut parts = line.split_whitespace();
        let Some(word) = parts.next() else { continue };
        let values = parts
            .map(|s| {
                s.parse::<T>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(input, Position::Line(line_no), format!("bad vector component {s:?}")))
            })
            .collect::<Result<Vec<T>>>()?;
        if values.len() != dim {
            return Err(Error::DimensionMismatch {
                input: input.to_string(),
                line: line_no,
                expected: dim,
                found: values.len(),
            });
        }
        rows += 1;
        if vectors.insert(word.to_string(), values).is_some() {
            log::warn!("{input}: line {line_no}: duplicate word {word:?}, keeping the last row");
            duplicates.insert(word.to_string());
        }
    }
    if rows != declared {
        log::warn!("{input}: header declares {declared} rows, found {rows}");
    }
    Ok(LoadedEmbeddings {
        embeddings: Embeddings { dim, vectors },
        duplicates: duplicates.into_iter().collect(),
    })
}

pub fn load_word2vec_text<T: Real>(path: &Path) -> Result<LoadedEmbeddings<T>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_word2vec_text(std::io::BufReader::new(file), &path.display().to_string())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LossKind {
    /// Sum of Euclidean norms of the residuals.
    Euclidean,
    /// Sum of squared Euclidean norms.
    #[default]
    Squared,
}

impl FromStr for LossKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(LossKind::Euclidean),
            "squared" => Ok(LossKind::Squared),
            other => Err(format!("unknown loss {other:?} (euclidean, squared)")),
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Euclidean => "euclidean",
            LossKind::Squared => "squared",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig<T> {
    pub learning_rate: T,
    pub epochs: usize,
    pub seed: u64,
    pub loss: LossKind,
    /// `w_out` starts uniform in `[-init_scale, init_scale]`.
    pub init_scale: T,
    /// Retry a step at half the learning rate whenever it would raise the
    /// loss; the reduced rate is kept for later epochs.
    pub halve_on_increase: bool,
    /// Keep `w_in` fixed and train only the readout.
    pub freeze_input: bool,
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        TrainConfig {
            learning_rate: T::lit(0.05),
            epochs: 200,
            seed: 42,
            loss: LossKind::Squared,
            init_scale: T::lit(0.1),
            halve_on_increase: true,
            freeze_input: false,
        }
    }
}

impl<T: Real> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > T::zero() && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be positive".into()));
        }
        if !(self.init_scale > T::zero() && self.init_scale.is_finite()) {
            return Err(Error::InvalidConfig("init scale must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel<T> {
    vocab: Vec<String>,
    /// N x V; column `j` is the vector of `vocab[j]`.
    w_in: Array2<T>,
    /// K x N.
    w_out: Array2<T>,
}

impl<T: Real> EmbeddingModel<T> {
    /// Panics on inconsistent shapes.
    pub fn from_parts(vocab: Vec<String>, w_in: Array2<T>, w_out: Array2<T>) -> Self {
        assert_eq!(w_in.ncols(), vocab.len(), "w_in must have one column per word");
        assert_eq!(w_out.nrows(), K, "w_out must have K rows");
        assert_eq!(
            w_out.ncols(),
            w_in.nrows(),
            "w_out columns must match embedding dimension"
        );
        EmbeddingModel { vocab, w_in, w_out }
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn n_dim(&self) -> usize {
        self.w_in.nrows()
    }

    pub fn w_in(&self) -> &Array2<T> {
        &self.w_in
    }

    pub fn w_out(&self) -> &Array2<T> {
        &self.w_out
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.vocab.binary_search_by(|w| w.as_str().cmp(word)).ok()
    }

    /// Semantic vector of word `index`.
    pub fn vector(&self, index: usize) -> ArrayView1<'_, T> {
        self.w_in.column(index)
    }

    fn logits(&self, index: usize) -> Array1<T> {
        self.w_out.dot(&self.w_in.column(index))
    }

    /// Predicted histogram `softmax(w_out * w_in[:, index])`.
    pub fn forward(&self, index: usize) -> Array1<T> {
        softmax(self.logits(index).view())
    }

    /// The retrained vectors, keyed by word.
    pub fn embeddings(&self) -> Embeddings<T> {
        let vectors = self
            .vocab
            .iter()
            .enumerate()
            .map(|(j, w)| (w.clone(), self.w_in.column(j).to_vec()))
            .collect();
        Embeddings {
            dim: self.n_dim(),
            vectors,
        }
    }
}

/// Max-subtracted softmax.
pub fn softmax<T: Real>(z: ArrayView1<'_, T>) -> Array1<T> {
    let max = z.iter().copied().fold(T::neg_infinity(), T::max);
    let e = z.mapv(|v| (v - max).exp());
    let total = e.sum();
    e / total
}

/// Histogram targets aligned with a model's vocabulary: column `j` is the
/// histogram of `vocab[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Targets<T>(Array2<T>);

impl<T: Real> Targets<T> {
    /// Panics if a vocabulary word has no histogram.
    pub fn aligned(vocab: &[String], hists: &BTreeMap<String, ColorHistogram<T>>) -> Self {
        let mut m = Array2::zeros((K, vocab.len()));
        for (j, word) in vocab.iter().enumerate() {
            let h = &hists[word];
            for (k, &v) in h.bins.iter().enumerate() {
                m[[k, j]] = v;
            }
        }
        Targets(m)
    }

    pub fn from_matrix(m: Array2<T>) -> Self {
        assert_eq!(m.nrows(), K, "targets must have K rows");
        Targets(m)
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, T> {
        self.0.column(j)
    }

    pub fn len(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.0.ncols() == 0
    }
}

#[derive(Clone, Debug)]
pub struct InitializedModel<T> {
    pub model: EmbeddingModel<T>,
    pub targets: Targets<T>,
    /// Histogram words without a pretrained vector.
    pub excluded: Vec<String>,
}

/// Copies pretrained vectors of the histogram words into `w_in` (vocabulary
/// in lexicographic order) and draws `w_out` from the seeded generator.
pub fn init_model<T: Real>(
    hists: &BTreeMap<String, ColorHistogram<T>>,
    pretrained: &Embeddings<T>,
    config: &TrainConfig<T>,
) -> Result<InitializedModel<T>> {
    config.validate()?;
    let (vocab, excluded): (Vec<String>, Vec<String>) =
        hists.keys().cloned().partition(|w| pretrained.get(w).is_some());
    if vocab.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let n = pretrained.dim();
    let mut w_in = Array2::zeros((n, vocab.len()));
    for (j, word) in vocab.iter().enumerate() {
        let v = pretrained.get(word).expect("partitioned on presence");
        for (i, &x) in v.iter().enumerate() {
            w_in[[i, j]] = x;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scale = config.init_scale.as_f64();
    let dist = Uniform::new_inclusive(-scale, scale).expect("positive init scale");
    let w_out = Array2::from_shape_simple_fn((K, n), || T::lit(dist.sample(&mut rng)));
    let targets = Targets::aligned(&vocab, hists);
    Ok(InitializedModel {
        model: EmbeddingModel { vocab, w_in, w_out },
        targets,
        excluded,
    })
}

fn residual<T: Real>(model: &EmbeddingModel<T>, targets: &Targets<T>, j: usize) -> (Array1<T>, Array1<T>) {
    let p = model.forward(j);
    let r = &p - &targets.column(j);
    (p, r)
}

fn norm<T: Real>(v: &Array1<T>) -> T {
    v.dot(v).sqrt()
}

/// Loss contribution of each word.
pub fn per_word_loss<T: Real>(model: &EmbeddingModel<T>, targets: &Targets<T>, kind: LossKind) -> Vec<T> {
    (0..model.vocab.len())
        .map(|j| {
            let (_, r) = residual(model, targets, j);
            match kind {
                LossKind::Squared => r.dot(&r),
                LossKind::Euclidean => norm(&r),
            }
        })
        .collect()
}

pub fn loss<T: Real>(model: &EmbeddingModel<T>, targets: &Targets<T>, kind: LossKind) -> T {
    per_word_loss(model, targets, kind).into_iter().sum()
}

/// Below this residual norm the euclidean loss is treated as flat.
const EUCLIDEAN_GUARD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T> {
    pub w_in: Array2<T>,
    pub w_out: Array2<T>,
}

/// Full-batch analytic gradients. With `p = softmax(z)` and `r = p - h`, the
/// squared loss has `dL/dz = 2 (diag(p) - p p^T) r`; the euclidean loss
/// scales that by `1 / (2 |r|)`.
pub fn gradients<T: Real>(model: &EmbeddingModel<T>, targets: &Targets<T>, kind: LossKind) -> Gradients<T> {
    let mut g_in = Array2::zeros(model.w_in.raw_dim());
    let mut g_out = Array2::zeros(model.w_out.raw_dim());
    let two = T::lit(2.0);
    for j in 0..model.vocab.len() {
        let (p, r) = residual(model, targets, j);
        let pr = p.dot(&r);
        let mut dz = (&p * &r - &(&p * pr)) * two;
        if kind == LossKind::Euclidean {
            let rn = norm(&r);
            if rn < T::lit(EUCLIDEAN_GUARD) {
                continue;
            }
            dz /= two * rn;
        }
        let e = model.w_in.column(j);
        for (k, &dzk) in dz.iter().enumerate() {
            g_out.row_mut(k).scaled_add(dzk, &e);
        }
        g_in.column_mut(j).assign(&model.w_out.t().dot(&dz));
    }
    Gradients {
        w_in: g_in,
        w_out: g_out,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrace<T> {
    /// `losses[0]` is the initial loss, `losses[e]` the loss after epoch `e`.
    pub losses: Vec<T>,
    /// Step size used in each epoch (after any halving).
    pub learning_rates: Vec<T>,
}

impl<T: Real> TrainTrace<T> {
    pub fn final_loss(&self) -> T {
        *self.losses.last().expect("trace has the initial loss")
    }

    /// Writes `epoch,loss` rows, epoch 0 being the initial loss.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epoch", "loss"])?;
        for (epoch, l) in self.losses.iter().enumerate() {
            w.write_record([epoch.to_string(), l.to_string()])?;
        }
        w.flush()
    }
}

/// Give up on an epoch after this many halvings and keep the parameters.
const MAX_HALVINGS: usize = 60;

fn step<T: Real>(model: &EmbeddingModel<T>, grads: &Gradients<T>, lr: T, freeze_input: bool) -> EmbeddingModel<T> {
    let mut next = model.clone();
    next.w_out.scaled_add(-lr, &grads.w_out);
    if !freeze_input {
        next.w_in.scaled_add(-lr, &grads.w_in);
    }
    next
}

/// Full-batch gradient descent for `config.epochs` epochs.
pub fn train<T: Real>(
    model: &EmbeddingModel<T>,
    targets: &Targets<T>,
    config: &TrainConfig<T>,
) -> Result<(EmbeddingModel<T>, TrainTrace<T>)> {
    config.validate()?;
    assert_eq!(targets.len(), model.vocab.len(), "targets not aligned with vocabulary");
    let mut current = model.clone();
    let mut current_loss = loss(&current, targets, config.loss);
    if !current_loss.is_finite() {
        return Err(Error::DivergenceDetected {
            epoch: 0,
            loss: current_loss.as_f64(),
        });
    }
    let mut lr = config.learning_rate;
    let mut trace = TrainTrace {
        losses: vec![current_loss],
        learning_rates: Vec::with_capacity(config.epochs),
    };

    for epoch in 1..=config.epochs {
        let grads = gradients(&current, targets, config.loss);
        let mut halvings = 0;
        loop {
            let candidate = step(&current, &grads, lr, config.freeze_input);
            let candidate_loss = loss(&candidate, targets, config.loss);
            let worse = !candidate_loss.is_finite() || candidate_loss > current_loss;
            if !worse || !config.halve_on_increase {
                if !candidate_loss.is_finite() {
                    return Err(Error::DivergenceDetected {
                        epoch,
                        loss: candidate_loss.as_f64(),
                    });
                }
                current = candidate;
                current_loss = candidate_loss;
                break;
            }
            if halvings == MAX_HALVINGS {
                log::debug!("epoch {epoch}: no decreasing step found, parameters unchanged");
                break;
            }
            lr /= T::lit(2.0);
            halvings += 1;
        }
        trace.losses.push(current_loss);
        trace.learning_rates.push(lr);
    }
    Ok((current, trace))
}

pub fn cosine<T: Real>(u: &[T], v: &[T]) -> Result<T> {
    assert_eq!(u.len(), v.len(), "cosine of vectors with different lengths");
    let dot = u.iter().zip(v).map(|(&a, &b)| a * b).sum::<T>();
    let nu = u.iter().map(|&a| a * a).sum::<T>().sqrt();
    let nv = v.iter().map(|&b| b * b).sum::<T>().sqrt();
    if nu == T::zero() || nv == T::zero() {
        return Err(Error::ZeroVector);
    }
    // rounding can push |cos| a hair past 1
    Ok((dot / (nu * nv)).max(-T::one()).min(T::one()))
}
