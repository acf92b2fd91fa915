//! sRGB to CIELAB conversion, Euclidean Lab distance and nearest-centroid
//! quantization to the 13 ISCC-NBS basic colors.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::{Error, Position, Real, Result};

/// Number of basic colors, and therefore of histogram bins.
pub const K: usize = 13;

const BUNDLED_PALETTE: &str = include_str!("../data/basic_colors.tsv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SrgbColor {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl SrgbColor {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        SrgbColor { r, g, b }
    }

    /// Rec. 601 luma rounded to the nearest gray level.
    pub fn luma(self) -> u8 {
        let weighted = 299 * u32::from(self.r) + 587 * u32::from(self.g) + 114 * u32::from(self.b);
        ((weighted + 500) / 1000) as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LabColor<T> {
    pub l_star: T,
    pub a_star: T,
    pub b_star: T,
}

impl<T: Real> LabColor<T> {
    pub fn new(l_star: T, a_star: T, b_star: T) -> Self {
        LabColor { l_star, a_star, b_star }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.l_star, self.a_star, self.b_star]
    }

    pub fn from_array([l_star, a_star, b_star]: [T; 3]) -> Self {
        LabColor { l_star, a_star, b_star }
    }

    /// Componentwise mean; `None` for an empty iterator.
    pub fn mean<I: IntoIterator<Item = Self>>(colors: I) -> Option<Self> {
        let mut n = 0usize;
        let mut acc = [T::zero(); 3];
        for c in colors {
            n += 1;
            for (a, v) in acc.iter_mut().zip(c.to_array()) {
                *a += v;
            }
        }
        if n == 0 {
            return None;
        }
        let n = T::from_count(n);
        Some(Self::from_array(acc.map(|a| a / n)))
    }

    /// Total order over components, used for deterministic sorting.
    pub fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (a, b) = (self.to_array().map(T::as_f64), other.to_array().map(T::as_f64));
        a[0].total_cmp(&b[0])
            .then(a[1].total_cmp(&b[1]))
            .then(a[2].total_cmp(&b[2]))
    }
}

// sRGB primaries to XYZ (D65). The reference white is the image of sRGB white
// under this matrix, which pins white to L* = 100 with zero chroma.
const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

fn srgb_decode<T: Real>(channel: u8) -> T {
    let c = T::from_u8(channel).unwrap() / T::lit(255.0);
    if c <= T::lit(0.04045) {
        c / T::lit(12.92)
    } else {
        ((c + T::lit(0.055)) / T::lit(1.055)).powf(T::lit(2.4))
    }
}

fn lab_f<T: Real>(t: T) -> T {
    let epsilon = T::lit(216.0 / 24389.0);
    let kappa = T::lit(24389.0 / 27.0);
    if t > epsilon {
        t.cbrt()
    } else {
        (kappa * t + T::lit(16.0)) / T::lit(116.0)
    }
}

/// CIELAB under D65 / 2° observer.
pub fn srgb_to_lab<T: Real>(c: SrgbColor) -> LabColor<T> {
    let rgb = [srgb_decode::<T>(c.r), srgb_decode(c.g), srgb_decode(c.b)];
    let mut f = [T::zero(); 3];
    for (i, row) in SRGB_TO_XYZ.iter().enumerate() {
        let white = T::lit(row.iter().sum());
        let v = row.iter().zip(rgb).fold(T::zero(), |acc, (&m, x)| acc + T::lit(m) * x);
        f[i] = lab_f(v / white);
    }
    LabColor {
        l_star: T::lit(116.0) * f[1] - T::lit(16.0),
        a_star: T::lit(500.0) * (f[0] - f[1]),
        b_star: T::lit(200.0) * (f[1] - f[2]),
    }
}

pub fn lab_distance<T: Real>(p: LabColor<T>, q: LabColor<T>) -> T {
    let dl = p.l_star - q.l_star;
    let da = p.a_star - q.a_star;
    let db = p.b_star - q.b_star;
    (dl * dl + da * da + db * db).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicColorName {
    Pink,
    Red,
    Orange,
    Brown,
    Yellow,
    Olive,
    YellowGreen,
    Green,
    Blue,
    Purple,
    White,
    Gray,
    Black,
}

impl BasicColorName {
    /// Canonical bin order.
    pub const ALL: [BasicColorName; K] = [
        BasicColorName::Pink,
        BasicColorName::Red,
        BasicColorName::Orange,
        BasicColorName::Brown,
        BasicColorName::Yellow,
        BasicColorName::Olive,
        BasicColorName::YellowGreen,
        BasicColorName::Green,
        BasicColorName::Blue,
        BasicColorName::Purple,
        BasicColorName::White,
        BasicColorName::Gray,
        BasicColorName::Black,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BasicColorName::Pink => "pink",
            BasicColorName::Red => "red",
            BasicColorName::Orange => "orange",
            BasicColorName::Brown => "brown",
            BasicColorName::Yellow => "yellow",
            BasicColorName::Olive => "olive",
            BasicColorName::YellowGreen => "yellow-green",
            BasicColorName::Green => "green",
            BasicColorName::Blue => "blue",
            BasicColorName::Purple => "purple",
            BasicColorName::White => "white",
            BasicColorName::Gray => "gray",
            BasicColorName::Black => "black",
        }
    }

    pub fn is_chromatic(self) -> bool {
        !matches!(
            self,
            BasicColorName::White | BasicColorName::Gray | BasicColorName::Black
        )
    }
}

impl fmt::Display for BasicColorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BasicColorName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        BasicColorName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown basic color {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasicColor<T> {
    pub name: BasicColorName,
    /// sRGB anchor the centroid was converted from.
    pub anchor: SrgbColor,
    pub centroid: LabColor<T>,
}

impl<T> BasicColor<T> {
    pub fn chromatic(&self) -> bool {
        self.name.is_chromatic()
    }
}

/// The 13 basic colors in bin order.
///
/// Centroids are given as sRGB anchors in a TSV file
/// (`name<TAB>r<TAB>g<TAB>b`, one color per line) and converted to Lab when
/// the palette is loaded. Lines starting with `#` are comments; a comment of
/// the form `# version: <tag>` names the palette revision.
#[derive(Clone, Debug, PartialEq)]
pub struct Palette<T> {
    version: Option<String>,
    entries: Vec<BasicColor<T>>,
}

impl<T: Real> Palette<T> {
    /// Palette shipped with the crate (`data/basic_colors.tsv`).
    pub fn bundled() -> Self {
        Self::from_tsv_str(BUNDLED_PALETTE, "basic_colors.tsv").expect("bundled palette is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv_str(&text, &path.display().to_string())
    }

    pub fn from_tsv_str(text: &str, input: &str) -> Result<Self> {
        let mut version = None;
        let mut entries = Vec::with_capacity(K);
        for (idx, line) in text.lines().enumerate() {
            let at = Position::Line(idx + 1);
            let trimmed = line.trim();
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(tag) = comment.trim().strip_prefix("version:") {
                    version = Some(tag.trim().to_string());
                }
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::parse(
                    input,
                    at,
                    format!("expected 4 tab-separated fields, found {}", fields.len()),
                ));
            }
            let name: BasicColorName = fields[0].parse().map_err(|e: String| Error::parse(input, at, e))?;
            let mut rgb = [0u8; 3];
            for (slot, field) in rgb.iter_mut().zip(&fields[1..]) {
                *slot = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(input, at, format!("channel {field:?} is not an integer in 0..=255")))?;
            }
            let anchor = SrgbColor::new(rgb[0], rgb[1], rgb[2]);
            entries.push(BasicColor {
                name,
                anchor,
                centroid: srgb_to_lab(anchor),
            });
        }
        let palette = Palette { version, entries };
        palette.validate()?;
        Ok(palette)
    }

    fn validate(&self) -> Result<()> {
        if self.entries.len() != K {
            return Err(Error::InvalidPalette(format!(
                "expected {K} colors, found {}",
                self.entries.len()
            )));
        }
        for (bin, (entry, expected)) in self.entries.iter().zip(BasicColorName::ALL).enumerate() {
            if entry.name != expected {
                return Err(Error::InvalidPalette(format!(
                    "bin {bin} must be {expected}, found {}",
                    entry.name
                )));
            }
        }
        Ok(())
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn entries(&self) -> &[BasicColor<T>] {
        &self.entries
    }

    pub fn names(&self) -> [&'static str; K] {
        BasicColorName::ALL.map(BasicColorName::as_str)
    }

    /// Index of the nearest centroid; the lowest index wins a tie.
    pub fn quantize(&self, c: LabColor<T>) -> usize {
        let mut best = 0;
        let mut best_dist = T::infinity();
        for (bin, entry) in self.entries.iter().enumerate() {
            let d = lab_distance(c, entry.centroid);
            if d < best_dist {
                best = bin;
                best_dist = d;
            }
        }
        best
    }

    /// White, gray and black are achromatic.
    ///
    /// Panics if `bin >= K`.
    pub fn is_achromatic(&self, bin: usize) -> bool {
        assert!(bin < K, "bin {bin} out of range 0..{K}");
        !self.entries[bin].chromatic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(c: (u8, u8, u8)) -> LabColor<f64> {
        srgb_to_lab(SrgbColor::new(c.0, c.1, c.2))
    }

    fn assert_lab(got: LabColor<f64>, want: [f64; 3], tol: f64) {
        for (g, w) in got.to_array().iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn white_and_black_anchor_points() {
        assert_lab(lab((255, 255, 255)), [100.0, 0.0, 0.0], 1e-3);
        assert_lab(lab((0, 0, 0)), [0.0, 0.0, 0.0], 1e-3);
    }

    // Frozen from a standalone script implementing sRGB -> XYZ(D65) -> Lab,
    // cross-checked against skimage.color.rgb2lab to 2e-3.
    #[test]
    fn golden_lab_values() {
        assert_lab(
            lab((255, 0, 0)),
            [53.24079183328088, 80.09246954480042, 67.20319253649727],
            1e-9,
        );
        assert_lab(
            lab((0, 128, 255)),
            [54.71498553427068, 18.777256623956852, -70.91805773322817],
            1e-9,
        );
        assert_lab(
            lab((10, 200, 30)),
            [70.4998216526913, -70.51347849886874, 64.94015871893298],
            1e-9,
        );
    }

    #[test]
    fn gray_axis_has_no_chroma() {
        for v in [0u8, 128, 255] {
            let c = lab((v, v, v));
            assert!(c.a_star.abs() < 1e-3 && c.b_star.abs() < 1e-3, "{v}: {c:?}");
        }
    }

    #[test]
    fn f32_conversion_tracks_f64() {
        let a: LabColor<f32> = srgb_to_lab(SrgbColor::new(255, 0, 0));
        let b = lab((255, 0, 0));
        assert!((f64::from(a.l_star) - b.l_star).abs() < 1e-3);
        assert!((f64::from(a.a_star) - b.a_star).abs() < 1e-3);
    }

    #[test]
    fn distance_examples() {
        let x = LabColor::new(50.0, 10.0, -10.0);
        assert_eq!(lab_distance(x, x), 0.0);
        assert_eq!(
            lab_distance(LabColor::new(0.0, 0.0, 0.0), LabColor::new(100.0, 0.0, 0.0)),
            100.0
        );
        // sqrt(10^2 + 15^2 + 12^2)
        let d: f64 = lab_distance(x, LabColor::new(40.0, -5.0, 2.0));
        assert!((d - 21.656407827707714).abs() < 1e-12);
    }

    #[test]
    fn bundled_palette_shape() {
        let pal = Palette::<f64>::bundled();
        assert_eq!(pal.entries().len(), K);
        assert_eq!(pal.version(), Some("iscc-nbs-l1-approx-1"));
        let achromatic = (0..K).filter(|&b| pal.is_achromatic(b)).count();
        assert_eq!(achromatic, 3);
        assert!(pal.is_achromatic(10) && pal.is_achromatic(11) && pal.is_achromatic(12));
        assert!(!pal.is_achromatic(1));
    }

    #[test]
    #[should_panic]
    fn is_achromatic_rejects_out_of_range() {
        Palette::<f64>::bundled().is_achromatic(K);
    }

    #[test]
    fn quantize_centroids_and_pure_red() {
        let pal = Palette::<f64>::bundled();
        for (bin, entry) in pal.entries().iter().enumerate() {
            assert_eq!(pal.quantize(entry.centroid), bin);
        }
        let red = pal.quantize(lab((255, 0, 0)));
        assert_eq!(pal.entries()[red].name, BasicColorName::Red);
    }

    #[test]
    fn quantize_tie_goes_to_lower_bin() {
        let pal = Palette::<f64>::bundled();
        let mut exact_ties = 0;
        for i in 0..K {
            for j in (i + 1)..K {
                let (a, b) = (pal.entries()[i].centroid, pal.entries()[j].centroid);
                let mid = LabColor::from_array([0, 1, 2].map(|k| (a.to_array()[k] + b.to_array()[k]) / 2.0));
                let (da, db) = (lab_distance(mid, a), lab_distance(mid, b));
                let nearest_other = (0..K)
                    .filter(|&k| k != i && k != j)
                    .map(|k| lab_distance(mid, pal.entries()[k].centroid))
                    .fold(f64::INFINITY, f64::min);
                if da == db && da < nearest_other {
                    exact_ties += 1;
                    assert_eq!(pal.quantize(mid), i);
                }
            }
        }
        assert!(exact_ties > 0, "no exactly equidistant midpoint found");
    }

    #[test]
    fn palette_rejects_bad_files() {
        let short = "pink\t1\t2\t3\n";
        assert!(matches!(
            Palette::<f64>::from_tsv_str(short, "p"),
            Err(Error::InvalidPalette(_))
        ));
        let reordered = BUNDLED_PALETTE.replacen("pink", "red", 1);
        assert!(Palette::<f64>::from_tsv_str(&reordered, "p").is_err());
        let bad_channel = BUNDLED_PALETTE.replacen("234", "256", 1);
        assert!(matches!(
            Palette::<f64>::from_tsv_str(&bad_channel, "p"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn luma_weights() {
        assert_eq!(SrgbColor::new(255, 255, 255).luma(), 255);
        assert_eq!(SrgbColor::new(0, 0, 0).luma(), 0);
        assert_eq!(SrgbColor::new(255, 0, 0).luma(), 76);
    }
}
