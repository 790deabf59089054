//! Error-bar plot of a sweep: one marker per noise level at the mean error,
//! a vertical bar spanning mean +- std.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::sim::SweepRow;

use super::files::format_g;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=TICKS).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / TICKS as f64)
    }
}

/// Renders rows with finite statistics; rows where every trial failed are
/// left out.
pub fn render(rows: &[SweepRow]) -> Result<String> {
    let shown: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.eta.is_finite() && r.mean_error.is_finite() && r.std_error.is_finite())
        .collect();
    if shown.is_empty() {
        return Err(Error::InvalidInput("no rows with finite statistics to plot".into()));
    }
    let eta_lo = shown.iter().map(|r| r.eta).fold(f64::INFINITY, f64::min);
    let mut eta_hi = shown.iter().map(|r| r.eta).fold(f64::NEG_INFINITY, f64::max);
    if eta_hi <= eta_lo {
        eta_hi = eta_lo + 1.0;
    }
    let mut y_hi = shown
        .iter()
        .map(|r| r.mean_error + r.std_error)
        .fold(0.0, f64::max);
    if y_hi <= 0.0 {
        y_hi = 1.0;
    }
    let x = Axis { lo: eta_lo, hi: eta_hi, px_lo: LEFT, px_hi: WIDTH - RIGHT };
    let y = Axis { lo: 0.0, hi: y_hi, px_lo: HEIGHT - BOTTOM, px_hi: TOP };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<style>.axis{{stroke:#000;stroke-width:1}} .bar{{stroke:#1f77b4;stroke-width:1.2}} .marker{{fill:#d62728}} text{{font-family:sans-serif;font-size:11px}}</style>
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let (x0, x1, y0, y1) = (x.px_lo, x.px_hi, y.px_lo, y.px_hi);
    let _ = writeln!(s, r#"<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(s, r#"<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    for t in x.ticks() {
        let px = x.map(t);
        let _ = writeln!(
            s,
            r#"<line class="axis tick" x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.2}"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            format_g(t)
        );
    }
    for t in y.ticks() {
        let py = y.map(t);
        let _ = writeln!(
            s,
            r#"<line class="axis tick" x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            format_g((t * 1e6).round() / 1e6)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">noise level η</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">mean localization error</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    for r in &shown {
        let px = x.map(r.eta);
        let lo = y.map((r.mean_error - r.std_error).max(0.0));
        let hi = y.map(r.mean_error + r.std_error);
        let _ = writeln!(s, r#"<line class="bar" x1="{px:.2}" y1="{lo:.2}" x2="{px:.2}" y2="{hi:.2}"/>"#);
    }
    for r in &shown {
        let _ = writeln!(
            s,
            r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3"/>"#,
            x.map(r.eta),
            y.map(r.mean_error)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
