//! Minimal SVG 1.1 line/marker/heatmap plots.

use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 540.0;
const LEFT: f64 = 75.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

pub const STABLE: &str = "#1f5fbf";
pub const UNSTABLE: &str = "#c0392b";
pub const NEUTRAL: &str = "#555555";

pub struct Plot {
    x: (f64, f64),
    y: (f64, f64),
    title: String,
    xlabel: String,
    ylabel: String,
    body: String,
    legend: Vec<(String, String, bool)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Padded bounds of the finite values, never degenerate.
pub fn bounds(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.into_iter().filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    let pad = if span > 0.0 { 0.05 * span } else { 0.5 * lo.abs().max(1.0) };
    (lo - pad, hi + pad)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

impl Plot {
    pub fn new(title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64)) -> Plot {
        Plot {
            x,
            y,
            title: title.into(),
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            body: String::new(),
            legend: Vec::new(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (H - TOP - BOTTOM)
    }

    /// Polyline; non-finite points break it into pieces.
    pub fn line(&mut self, pts: &[(f64, f64)], color: &str, dashed: bool) {
        let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
        for run in pts.split(|(x, y)| !x.is_finite() || !y.is_finite()) {
            if run.len() < 2 {
                continue;
            }
            let coords: Vec<String> =
                run.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
            let _ = writeln!(
                self.body,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>"#,
                coords.join(" ")
            );
        }
    }

    pub fn marker(&mut self, at: (f64, f64), color: &str, filled: bool, text: Option<&str>) {
        let (cx, cy) = (self.px(at.0), self.py(at.1));
        let fill = if filled { color } else { "white" };
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="{fill}" stroke="{color}" stroke-width="1.5"/>"#
        );
        if let Some(t) = text {
            let _ = writeln!(
                self.body,
                r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
                cx + 6.0,
                cy - 6.0,
                escape(t)
            );
        }
    }

    /// Filled rectangle in data coordinates.
    pub fn cell(&mut self, x: (f64, f64), y: (f64, f64), color: &str) {
        let (x0, x1) = (self.px(x.0), self.px(x.1));
        let (y0, y1) = (self.py(y.1), self.py(y.0));
        let _ = writeln!(
            self.body,
            r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
            x1 - x0,
            y1 - y0
        );
    }

    pub fn legend(&mut self, text: &str, color: &str, dashed: bool) {
        self.legend.push((text.into(), color.into(), dashed));
    }

    pub fn finish(self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
        let _ = writeln!(
            s,
            r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath></defs>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" font-size="15" text-anchor="middle">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );
        for t in ticks(self.x.0, self.x.1) {
            let x = self.px(t);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                H - BOTTOM,
                H - BOTTOM + 5.0,
                H - BOTTOM + 18.0,
                label(t)
            );
        }
        for t in ticks(self.y.0, self.y.1) {
            let y = self.py(t);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                y + 4.0,
                label(t)
            );
        }
        let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);
        s.push_str(&self.body);
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 12.0,
            escape(&self.xlabel)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.ylabel)
        );
        for (i, (text, color, dashed)) in self.legend.iter().enumerate() {
            let y = TOP + 16.0 + 16.0 * i as f64;
            let x = W - RIGHT - 170.0;
            let dash = if *dashed { r#" stroke-dasharray="6,4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                x + 24.0,
                x + 30.0,
                y + 4.0,
                escape(text)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        let labels = |lo, hi| ticks(lo, hi).into_iter().map(label).collect::<Vec<_>>();
        assert_eq!(labels(0.0, 1.0), ["0", "0.2", "0.4", "0.6", "0.8", "1"]);
        assert_eq!(labels(-0.07, 0.11), ["-0.05", "0", "0.05", "0.1"]);
        assert_eq!(labels(9.5, 20.0), ["10", "12.5", "15", "17.5", "20"]);
    }

    #[test]
    fn bounds_pad_and_handle_degenerate() {
        assert_eq!(bounds([1.0, 1.0]), (0.5, 1.5));
        assert_eq!(bounds([f64::NAN]), (0.0, 1.0));
        let (lo, hi) = bounds([0.0, 10.0]);
        assert!(lo < 0.0 && hi > 10.0);
    }

    #[test]
    fn document_is_svg11() {
        let mut p = Plot::new("a < b", "x", "y", (0.0, 1.0), (0.0, 1.0));
        p.line(&[(0.0, 0.0), (1.0, 1.0), (f64::NAN, 0.0), (0.5, 0.5)], STABLE, true);
        let s = p.finish();
        assert!(s.contains(r#"version="1.1""#));
        assert!(s.contains("a &lt; b"));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert!(s.trim_end().ends_with("</svg>"));
    }
}
