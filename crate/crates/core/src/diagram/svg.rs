use std::fmt::Write as _;

use crate::persistence::Barcode;
use crate::scalar::Scalar;

const COLORS: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    /// Draws a vertical reference line at this value.
    pub tau: Option<f64>,
    /// Upper end of both axes; defaults to the largest finite endpoint (or `tau`).
    pub max_value: Option<f64>,
    pub include_zero_length: bool,
    pub title: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            width: 480.0,
            height: 480.0,
            tau: Some(1.0),
            max_value: None,
            include_zero_length: false,
            title: None,
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders a persistence diagram: birth on x, death on y, a dashed diagonal,
/// one point series per dimension and infinite deaths on a rail above the
/// plot. Output depends only on the inputs.
pub fn emit_diagram_svg<T: Scalar>(barcode: &Barcode<T>, options: &SvgOptions) -> String {
    let bars: Vec<(usize, f64, Option<f64>)> = barcode
        .intervals()
        .iter()
        .filter(|iv| options.include_zero_length || !iv.is_zero_length())
        .map(|iv| {
            let death = (!iv.is_infinite()).then(|| iv.death.as_f64());
            (iv.dim, iv.birth.as_f64(), death)
        })
        .collect();
    let data_max = bars
        .iter()
        .flat_map(|&(_, b, d)| [Some(b), d])
        .flatten()
        .chain(options.tau)
        .fold(0.0f64, f64::max);
    let top = options.max_value.unwrap_or(if data_max > 0.0 { data_max * 1.05 } else { 1.0 });

    let (w, h) = (options.width, options.height);
    let (left, right, bottom, upper) = (48.0, 16.0, 40.0, 40.0);
    let plot_w = w - left - right;
    let plot_h = h - upper - bottom;
    let x = |v: f64| left + v / top * plot_w;
    let y = |v: f64| upper + plot_h - v / top * plot_h;
    let rail = upper - 16.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    if let Some(title) = &options.title {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="14" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            w / 2.0,
            escape(title)
        );
    }
    // axes
    let _ = writeln!(
        s,
        r#"<g id="axes" stroke="black" stroke-width="1"><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/></g>"#,
        x(0.0),
        y(0.0),
        x(top),
        y(0.0),
        x(0.0),
        y(0.0),
        x(0.0),
        y(top)
    );
    let _ = writeln!(s, r#"<g id="ticks" font-family="sans-serif" font-size="10">"#);
    for k in 0..=4 {
        let v = top * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            x(v),
            y(0.0) + 14.0,
            x(0.0) - 4.0,
            y(v) + 3.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">birth</text></g>"#,
        left + plot_w / 2.0,
        h - 8.0
    );
    let _ = writeln!(
        s,
        r#"<line id="diagonal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
        x(0.0),
        y(0.0),
        x(top),
        y(top)
    );
    if let Some(tau) = options.tau.filter(|&t| t <= top) {
        let _ = writeln!(
            s,
            r#"<line id="tau" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="red" stroke-width="1"/>"#,
            x(tau),
            y(0.0),
            x(tau),
            rail
        );
    }
    if bars.iter().any(|b| b.2.is_none()) {
        let _ = writeln!(
            s,
            r#"<g id="infinity-rail"><line x1="{:.2}" y1="{rail:.2}" x2="{:.2}" y2="{rail:.2}" stroke="gray" stroke-dasharray="2 2"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">inf</text></g>"#,
            x(0.0),
            x(top),
            x(0.0) - 4.0,
            rail + 3.0
        );
    }
    let max_dim = bars.iter().map(|b| b.0).max();
    for dim in 0..=max_dim.unwrap_or(0) {
        if max_dim.is_none() {
            break;
        }
        let color = COLORS[dim % COLORS.len()];
        let _ = writeln!(s, r#"<g id="H{dim}" fill="{color}" fill-opacity="0.7">"#);
        for &(_, birth, death) in bars.iter().filter(|b| b.0 == dim) {
            let cy = death.map_or(rail, y);
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{cy:.2}" r="3"/>"#, x(birth));
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10">H{dim}</text></g>"#,
            x(top) - 30.0,
            y(0.0) - 8.0 - 12.0 * dim as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
