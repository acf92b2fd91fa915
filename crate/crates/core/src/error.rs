use std::fmt;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Where in an input a parse error was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    /// 1-based line number of a text input.
    Line(usize),
    /// 0-based byte offset of a binary input.
    Byte(usize),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Line(n) => write!(f, "line {n}"),
            Position::Byte(n) => write!(f, "byte {n}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{input}: {at}: {reason}")]
    Parse {
        input: String,
        at: Position,
        reason: String,
    },

    #[error("degenerate image: every pixel has gray level {level}")]
    DegenerateImage { level: u8 },

    #[error("{input}: line {line}: expected {expected} vector components, found {found}")]
    DimensionMismatch {
        input: String,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("no word has enough observations to build a histogram")]
    EmptyResult,

    #[error("no histogram word has a pretrained vector")]
    EmptyIntersection,

    #[error("training diverged at epoch {epoch} (loss {loss}); lower the learning rate")]
    DivergenceDetected { epoch: usize, loss: f64 },

    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,

    #[error("invalid palette: {0}")]
    InvalidPalette(String),

    #[error("invalid lemma map: {0}")]
    InvalidLemmaMap(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("nothing to plot")]
    EmptyPlot,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(input: impl Into<String>, at: Position, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            at,
            reason: reason.into(),
        }
    }
}
