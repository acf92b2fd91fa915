//! Font-color usage of words and color-grounded word embeddings.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`imaging`] separates character pixels from background pixels in a
//!    cropped word image with Otsu's threshold and averages both classes in
//!    CIELAB.
//! 2. [`corpus`] ingests per-image observation records, normalizes tokens
//!    (lemma map, stopword list, digit/compound filters) and groups them by
//!    word.
//! 3. [`histogram`] quantizes each word's foreground colors to the 13 basic
//!    colors of [`color`], builds normalized per-word histograms and scores
//!    how particular each word's color usage is.
//! 4. [`embedding`] retrains a pretrained embedding matrix so that a softmax
//!    readout predicts each word's histogram, and [`eval`] compares pair
//!    similarities before and after retraining.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the file formats and the CLI
//! use.

pub mod color;
pub mod corpus;
pub mod embedding;
mod error;
pub mod eval;
pub mod histogram;
pub mod imaging;
mod scalar;
pub mod svg;

pub use error::{Error, Position, Result};
pub use scalar::Real;

pub use color::{BasicColorName, SrgbColor, K};

pub type LabColor = color::LabColor<f64>;
pub type Palette = color::Palette<f64>;
pub type WordColorSample = imaging::WordColorSample<f64>;
pub type Observation = corpus::Observation<f64>;
pub type Corpus = corpus::Corpus<f64>;
pub type ColorHistogram = histogram::ColorHistogram<f64>;
pub type HistogramSet = histogram::HistogramSet<f64>;
pub type Embeddings = embedding::Embeddings<f64>;
pub type EmbeddingModel = embedding::EmbeddingModel<f64>;
pub type TrainConfig = embedding::TrainConfig<f64>;
pub type PairReport = eval::PairReport<f64>;
