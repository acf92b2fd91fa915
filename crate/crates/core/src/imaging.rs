//! Character/background separation of cropped word images.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::color::{srgb_to_lab, LabColor, SrgbColor};
use crate::{Error, Position, Real, Result};

/// Pixel counts per 8-bit gray level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayHistogram {
    counts: [u64; 256],
}

impl Default for GrayHistogram {
    fn default() -> Self {
        GrayHistogram { counts: [0; 256] }
    }
}

impl GrayHistogram {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        GrayHistogram { counts }
    }

    pub fn from_levels<I: IntoIterator<Item = u8>>(levels: I) -> Self {
        let mut h = GrayHistogram::default();
        for level in levels {
            h.counts[usize::from(level)] += 1;
        }
        h
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Between-class variance of a split, kept as the exact fraction
/// `(s0 * n - S * w0)^2 / (w0 * w1)` with integer numerator root and
/// denominator. Scaling by `n^2` is common to all splits of one histogram.
#[derive(Clone, Copy)]
struct SplitScore {
    root: u128,
    den: u128,
}

impl SplitScore {
    fn cmp(&self, other: &SplitScore) -> Ordering {
        let exact = self
            .root
            .checked_mul(self.root)
            .and_then(|sq| sq.checked_mul(other.den))
            .zip(
                other
                    .root
                    .checked_mul(other.root)
                    .and_then(|sq| sq.checked_mul(self.den)),
            );
        match exact {
            Some((lhs, rhs)) => lhs.cmp(&rhs),
            None => {
                let lhs = (self.root as f64).powi(2) / self.den as f64;
                let rhs = (other.root as f64).powi(2) / other.den as f64;
                lhs.total_cmp(&rhs)
            }
        }
    }
}

/// Otsu's threshold: the level `t` maximizing between-class variance when
/// levels `<= t` form one class and levels `> t` the other. Only splits with
/// both classes non-empty are considered; ties go to the smallest `t`.
pub fn otsu_threshold(h: &GrayHistogram) -> Result<u8> {
    let n = u128::from(h.total());
    let weighted_total: u128 = h
        .counts
        .iter()
        .enumerate()
        .map(|(level, &c)| level as u128 * u128::from(c))
        .sum();

    let mut w0: u128 = 0;
    let mut s0: u128 = 0;
    let mut best: Option<(u8, SplitScore)> = None;
    for t in 0..255u8 {
        let c = u128::from(h.counts[usize::from(t)]);
        w0 += c;
        s0 += u128::from(t) * c;
        let w1 = n - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let score = SplitScore {
            root: (s0 * n).abs_diff(weighted_total * w0),
            den: w0 * w1,
        };
        if best.is_none_or(|(_, b)| score.cmp(&b) == Ordering::Greater) {
            best = Some((t, score));
        }
    }
    match best {
        Some((t, _)) => Ok(t),
        None => {
            let level = h.counts.iter().position(|&c| c > 0).unwrap_or(0) as u8;
            Err(Error::DegenerateImage { level })
        }
    }
}

/// Row-major sRGB image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelGrid {
    width: usize,
    height: usize,
    pixels: Vec<SrgbColor>,
}

impl PixelGrid {
    /// Panics unless `pixels.len() == width * height`.
    pub fn new(width: usize, height: usize, pixels: Vec<SrgbColor>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel count does not match dimensions");
        PixelGrid { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[SrgbColor] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> SrgbColor {
        self.pixels[y * self.width + x]
    }
}

pub fn load_ppm(path: &Path) -> Result<PixelGrid> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_ppm(&bytes, &path.display().to_string())
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    input: &'a str,
}

impl HeaderReader<'_> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::parse(self.input, Position::Byte(self.pos), reason)
    }

    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(self.input, Position::Byte(start), format!("{what} out of range")))
    }
}

/// Parses a binary `P6` PPM with maxval 255.
pub fn parse_ppm(bytes: &[u8], input: &str) -> Result<PixelGrid> {
    let mut r = HeaderReader { bytes, pos: 0, input };
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(r.err("not a binary PPM (magic number P6 expected)"));
    }
    r.pos = 2;
    let width = r.number("width")?;
    let height = r.number("height")?;
    let maxval = r.number("maxval")?;
    if maxval != 255 {
        return Err(r.err(format!("unsupported maxval {maxval}, only 255 is accepted")));
    }
    if !bytes.get(r.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(r.err("expected a single whitespace byte before the raster"));
    }
    r.pos += 1;
    if width == 0 || height == 0 {
        return Err(r.err("image has no pixels"));
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| r.err("image dimensions overflow"))?;
    let raster = &bytes[r.pos..];
    if raster.len() < len {
        return Err(Error::parse(
            input,
            Position::Byte(bytes.len()),
            format!("truncated raster: expected {len} bytes, found {}", raster.len()),
        ));
    }
    let pixels = raster[..len]
        .chunks_exact(3)
        .map(|p| SrgbColor::new(p[0], p[1], p[2]))
        .collect();
    Ok(PixelGrid::new(width, height, pixels))
}

/// Which Otsu class holds the character pixels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FgClass {
    /// The class with fewer pixels; on equal counts, the darker class.
    #[default]
    Smaller,
    Darker,
    Lighter,
}

impl FromStr for FgClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "smaller" => Ok(FgClass::Smaller),
            "darker" => Ok(FgClass::Darker),
            "lighter" => Ok(FgClass::Lighter),
            other => Err(format!("unknown foreground class {other:?} (smaller, darker, lighter)")),
        }
    }
}

impl fmt::Display for FgClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FgClass::Smaller => "smaller",
            FgClass::Darker => "darker",
            FgClass::Lighter => "lighter",
        })
    }
}

/// Mean colors of the character and background pixels of one word image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WordColorSample<T> {
    pub fg: LabColor<T>,
    pub bg: LabColor<T>,
    pub fg_pixel_count: usize,
    pub bg_pixel_count: usize,
    pub threshold: u8,
}

pub fn extract_word_color<T: Real>(grid: &PixelGrid, fg_class: FgClass) -> Result<WordColorSample<T>> {
    let levels: Vec<u8> = grid.pixels.iter().map(|p| p.luma()).collect();
    let threshold = otsu_threshold(&GrayHistogram::from_levels(levels.iter().copied()))?;

    let dark = || grid.pixels.iter().zip(&levels).filter(|(_, &l)| l <= threshold);
    let light = || grid.pixels.iter().zip(&levels).filter(|(_, &l)| l > threshold);
    let dark_count = dark().count();
    let light_count = grid.pixels.len() - dark_count;

    let fg_is_dark = match fg_class {
        FgClass::Darker => true,
        FgClass::Lighter => false,
        FgClass::Smaller => dark_count <= light_count,
    };
    let dark_mean = LabColor::mean(dark().map(|(p, _)| srgb_to_lab(*p))).expect("non-empty class");
    let light_mean = LabColor::mean(light().map(|(p, _)| srgb_to_lab(*p))).expect("non-empty class");

    Ok(if fg_is_dark {
        WordColorSample {
            fg: dark_mean,
            bg: light_mean,
            fg_pixel_count: dark_count,
            bg_pixel_count: light_count,
            threshold,
        }
    } else {
        WordColorSample {
            fg: light_mean,
            bg: dark_mean,
            fg_pixel_count: light_count,
            bg_pixel_count: dark_count,
            threshold,
        }
    })
}

/// Loads and processes images concurrently; results keep input order.
pub fn extract_batch<T: Real>(paths: &[&Path], fg_class: FgClass) -> Vec<Result<WordColorSample<T>>> {
    paths
        .par_iter()
        .map(|p| load_ppm(p).and_then(|grid| extract_word_color(&grid, fg_class)))
        .collect()
}
