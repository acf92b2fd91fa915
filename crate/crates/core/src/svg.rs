//! Standalone SVG 1.1 plots: the particularity scatter, the before/after pair
//! similarity scatter and the similarity box plots.
//!
//! Output is byte-deterministic: fixed canvas sizes and fixed decimal places.

use std::fmt::Write;

use crate::color::{Palette, SrgbColor};
use crate::eval::{DistributionSummary, FiveNumber, PairReport, Relation};
use crate::histogram::ParticularityReport;
use crate::{Error, Real, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const LEFT: f64 = 80.0;
const TOP: f64 = 50.0;
const PLOT: f64 = 500.0;

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="30" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn frame(out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" fill="none" stroke="#000000" stroke-width="1"/>"##
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        LEFT + PLOT / 2.0,
        TOP + PLOT + 45.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="25" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 25 {:.2})">{}</text>"#,
        TOP + PLOT / 2.0,
        TOP + PLOT / 2.0,
        escape(y_label)
    );
}

fn x_tick(out: &mut String, x: f64, label: &str) {
    let _ = writeln!(
        out,
        r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
        TOP + PLOT,
        TOP + PLOT + 5.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
        TOP + PLOT + 18.0
    );
}

fn y_tick(out: &mut String, y: f64, label: &str) {
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="#000000" stroke-width="1"/>"##,
        LEFT - 5.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#,
        LEFT - 8.0,
        y + 4.0
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn hex(c: SrgbColor) -> String {
    format!("#{:02x}{:02x}{:02x}", c.r, c.g, c.b)
}

/// Deviation from the mean histogram (y) against bin variance (x), one dot
/// per word filled with its dominant basic color, with dashed lines at the
/// quadrant thresholds.
pub fn particularity_scatter<T: Real>(report: &ParticularityReport<T>, palette: &Palette<T>) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::EmptyPlot);
    }
    let x_max = 12.0 / 169.0;
    let y_max = report
        .rows
        .iter()
        .map(|r| r.stats.deviation.as_f64())
        .fold(0.0, f64::max)
        .max(1e-9)
        * 1.05;
    let px = |v: f64| LEFT + v / x_max * PLOT;
    let py = |v: f64| TOP + PLOT - v / y_max * PLOT;

    let mut out = String::new();
    header(&mut out, "Color usage particularity");
    frame(
        &mut out,
        "variance of basic color frequency",
        "distance from mean histogram",
    );
    for i in 0..=4 {
        let v = x_max * f64::from(i) / 4.0;
        x_tick(&mut out, px(v), &format!("{v:.4}"));
        let v = y_max * f64::from(i) / 4.0;
        y_tick(&mut out, py(v), &format!("{v:.3}"));
    }
    let tx = px(report.thresholds.variance.as_f64());
    let ty = py(report.thresholds.deviation.as_f64());
    let _ = writeln!(
        out,
        r##"<line x1="{tx:.2}" y1="{TOP:.2}" x2="{tx:.2}" y2="{:.2}" stroke="#888888" stroke-width="1" stroke-dasharray="4 3"/>"##,
        TOP + PLOT
    );
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT:.2}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#888888" stroke-width="1" stroke-dasharray="4 3"/>"##,
        LEFT + PLOT
    );
    let _ = writeln!(out, r##"<g stroke="#333333" stroke-width="0.5">"##);
    for row in &report.rows {
        let fill = hex(palette.entries()[row.dominant].anchor);
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{fill}"><title>{} (quadrant {})</title></circle>"#,
            px(row.stats.variance.as_f64()),
            py(row.stats.deviation.as_f64()),
            escape(&row.word),
            row.stats.quadrant
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Linear blue to red ramp over `t` in `[0, 1]`.
pub fn similarity_ramp(t: f64) -> SrgbColor {
    let t = t.clamp(0.0, 1.0);
    let red = (255.0 * t).round() as u8;
    SrgbColor::new(red, 0, 255 - red)
}

/// Similarity after retraining (y) against before (x), both on `[-1, 1]`,
/// with the diagonal as reference. Dots are colored by histogram cosine,
/// blue for dissimilar color usage and red for similar.
///
/// Dots live in a group whose transform maps data units to the canvas, so a
/// dot's `cx`/`cy` are exactly its before/after similarities.
pub fn pair_scatter<T: Real>(reports: &[PairReport<T>]) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::EmptyPlot);
    }
    let scale = PLOT / 2.0;
    let cx = LEFT + scale;
    let cy = TOP + scale;
    let px = |v: f64| cx + v * scale;
    let py = |v: f64| cy - v * scale;

    let mut out = String::new();
    header(&mut out, "Pair similarity with and without color");
    frame(&mut out, "similarity before retraining", "similarity after retraining");
    for i in 0..=4 {
        let v = -1.0 + f64::from(i) / 2.0;
        x_tick(&mut out, px(v), &format!("{v:.1}"));
        y_tick(&mut out, py(v), &format!("{v:.1}"));
    }
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888888" stroke-width="1"/>"##,
        px(-1.0),
        py(-1.0),
        px(1.0),
        py(1.0)
    );
    let _ = writeln!(
        out,
        r##"<g transform="translate({cx:.2} {cy:.2}) scale({scale:.2} {:.2})" stroke="#333333" stroke-width="0.002">"##,
        -scale
    );
    for r in reports {
        let fill = hex(similarity_ramp(r.hist_cosine.as_f64()));
        let marker = match r.pair.relation {
            Relation::Synonym => "synonym",
            Relation::Antonym => "antonym",
        };
        let _ = writeln!(
            out,
            r#"<circle class="{marker}" cx="{:.6}" cy="{:.6}" r="0.012" fill="{fill}"><title>{} / {}</title></circle>"#,
            r.s_before.as_f64(),
            r.s_after.as_f64(),
            escape(&r.pair.w1),
            escape(&r.pair.w2)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Box plots of pair similarity: synonyms and antonyms, each before and
/// after retraining. Whiskers span min to max.
pub fn box_plot(summary: &DistributionSummary) -> Result<String> {
    let groups: Vec<(String, FiveNumber)> = [Relation::Synonym, Relation::Antonym]
        .into_iter()
        .filter_map(|rel| summary.get(rel).map(|s| (rel, s)))
        .flat_map(|(rel, s)| [(format!("{rel} before"), s.before), (format!("{rel} after"), s.after)])
        .collect();
    if groups.is_empty() {
        return Err(Error::EmptyPlot);
    }
    let py = |v: f64| TOP + PLOT - (v + 1.0) / 2.0 * PLOT;
    let slot = PLOT / 4.0;
    let half = slot * 0.3;

    let mut out = String::new();
    header(&mut out, "Similarity distributions");
    frame(&mut out, "", "cosine similarity");
    for i in 0..=4 {
        let v = -1.0 + f64::from(i) / 2.0;
        y_tick(&mut out, py(v), &format!("{v:.1}"));
    }
    for (i, (label, s)) in groups.iter().enumerate() {
        let x = LEFT + slot * (i as f64 + 0.5);
        let fill = if label.ends_with("before") {
            "#cccccc"
        } else {
            "#8fb3e0"
        };
        x_tick(&mut out, x, &escape(label));
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
            py(s.max),
            py(s.min)
        );
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" stroke="#000000" stroke-width="1"/>"##,
            x - half,
            py(s.q3),
            2.0 * half,
            py(s.q1) - py(s.q3)
        );
        for (v, w) in [(s.min, half / 2.0), (s.max, half / 2.0), (s.median, half)] {
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000000" stroke-width="{}"/>"##,
                x - w,
                py(v),
                x + w,
                py(v),
                if w == half { 2 } else { 1 }
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
