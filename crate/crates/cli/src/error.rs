use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] chromaword::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Empty(String),
}

pub type CliResult<T> = Result<T, CliError>;

/// Process exit status per error family.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const EMPTY: u8 = 4;
    pub const EMPTY_INTERSECTION: u8 = 5;
    pub const DIVERGENCE: u8 = 6;
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use chromaword::Error as E;
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Empty(_) => exit::EMPTY,
            CliError::Core(e) => match e {
                E::Io { .. } | E::ZeroVector => exit::IO,
                E::Parse { .. } | E::DimensionMismatch { .. } | E::InvalidPalette(_) | E::InvalidLemmaMap(_) => {
                    exit::PARSE
                }
                E::InvalidConfig(_) => exit::USAGE,
                E::EmptyResult | E::EmptyPlot | E::DegenerateImage { .. } => exit::EMPTY,
                E::EmptyIntersection => exit::EMPTY_INTERSECTION,
                E::DivergenceDetected { .. } => exit::DIVERGENCE,
            },
        }
    }
}
