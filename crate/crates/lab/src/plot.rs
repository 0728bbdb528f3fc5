//! Deterministic SVG output: heatmaps of scalar fields and line plots.
//!
//! Coordinates are printed with a fixed number of decimals so the same data
//! always produces the same bytes.

use std::fmt::Write as _;

use eikonal_core::ScalarField2D;

/// Heatmaps are block-averaged down to at most this many cells per axis.
pub const MAX_HEATMAP_CELLS: usize = 128;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;
const MASKED: &str = "#bdbdbd";
const PALETTE: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];
const SERIES: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Colour for `t ∈ [0, 1]`, piecewise linear through [`PALETTE`].
pub fn color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.5 };
    let x = t * (PALETTE.len() - 1) as f64;
    let k = (x.floor() as usize).min(PALETTE.len() - 2);
    let f = x - k as f64;
    let c: Vec<u8> = (0..3).map(|i| (PALETTE[k][i] + f * (PALETTE[k + 1][i] - PALETTE[k][i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Block averages of the valid cells; a block with no valid cell is `None`.
pub fn downsample(field: &ScalarField2D, max_cells: usize) -> (usize, Vec<Option<f64>>) {
    let n = field.grid().n();
    let block = n.div_ceil(max_cells.max(1));
    let m = n.div_ceil(block);
    let mut out = Vec::with_capacity(m * m);
    for bj in 0..m {
        for bi in 0..m {
            let (mut sum, mut count) = (0.0, 0usize);
            for j in bj * block..((bj + 1) * block).min(n) {
                for i in bi * block..((bi + 1) * block).min(n) {
                    if let Some(v) = field.get(i, j).filter(|v| v.is_finite()) {
                        sum += v;
                        count += 1;
                    }
                }
            }
            out.push((count > 0).then(|| sum / count as f64));
        }
    }
    (m, out)
}

fn header(s: &mut String, title: &str) {
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="20" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Heatmap of a scalar field with `x₂` pointing up, masked cells in grey and
/// a colour bar labelled with the value range.
pub fn heatmap(field: &ScalarField2D, title: &str) -> String {
    let (m, cells) = downsample(field, MAX_HEATMAP_CELLS);
    let lo = cells.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let hi = cells.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let side = HEIGHT - 2.0 * MARGIN;
    let px = side / m as f64;
    let mut s = String::new();
    header(&mut s, title);
    for bj in 0..m {
        for bi in 0..m {
            let fill = match cells[bj * m + bi] {
                None => MASKED.to_string(),
                Some(_) if !(hi > lo) => color(0.5),
                Some(v) => color((v - lo) / (hi - lo)),
            };
            let x = MARGIN + bi as f64 * px;
            let y = MARGIN + (m - 1 - bj) as f64 * px;
            let _ = writeln!(s, r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#, px + 0.01, px + 0.01);
        }
    }
    let bx = MARGIN + side + 24.0;
    for k in 0..32 {
        let t = k as f64 / 31.0;
        let y = MARGIN + (1.0 - t) * (side - side / 32.0);
        let _ = writeln!(s, r#"<rect x="{bx:.3}" y="{y:.3}" width="16" height="{:.3}" fill="{}"/>"#, side / 32.0 + 0.01, color(t));
    }
    let (lo_s, hi_s) = if lo.is_finite() { (format!("{lo:.4e}"), format!("{hi:.4e}")) } else { ("n/a".into(), "n/a".into()) };
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">max {hi_s}</text>"#, bx + 20.0, MARGIN + 10.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">min {lo_s}</text>"#, bx + 20.0, MARGIN + side);
    s.push_str("</svg>\n");
    s
}

/// A named polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: &str, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.to_string(), points }
    }
}

/// Line plot with optional logarithmic axes. Points that cannot be drawn
/// (non-positive on a log axis, non-finite) are dropped.
pub fn line_plot(series: &[Series], title: &str, x_label: &str, y_label: &str, log_x: bool, log_y: bool) -> String {
    let tx = |v: f64| if log_x { v.log10() } else { v };
    let ty = |v: f64| if log_y { v.log10() } else { v };
    let drawable = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!log_x || x > 0.0) && (!log_y || y > 0.0);
    let pts: Vec<Vec<(f64, f64)>> = series.iter().map(|s| s.points.iter().filter(|p| drawable(p)).map(|&(x, y)| (tx(x), ty(y))).collect()).collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let (pw, ph) = (WIDTH - 2.0 * MARGIN - 90.0, HEIGHT - 2.0 * MARGIN);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN + ph - (y - y0) / (y1 - y0) * ph;
    let mut s = String::new();
    header(&mut s, title);
    let _ = writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw:.3}" height="{ph:.3}" fill="none" stroke="black"/>"#);
    let label = |v: f64, log: bool| if log { format!("1e{v:.2}") } else { format!("{v:.4}") };
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{:.1}" font-family="sans-serif" font-size="10">{}</text>"#, MARGIN + ph + 14.0, label(x0, log_x));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#, MARGIN + pw, MARGIN + ph + 14.0, label(x1, log_x));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#, MARGIN - 4.0, MARGIN + ph, label(y0, log_y));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#, MARGIN - 4.0, MARGIN + 8.0, label(y1, log_y));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#, MARGIN + pw / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="14" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#, MARGIN + ph / 2.0, MARGIN + ph / 2.0, escape(y_label));
    for (k, (ser, p)) in series.iter().zip(&pts).enumerate() {
        let colour = SERIES[k % SERIES.len()];
        if !p.is_empty() {
            let coords: Vec<String> = p.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
            if p.len() <= 32 {
                for &(x, y) in p {
                    let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="2.5" fill="{colour}"/>"#, sx(x), sy(y));
                }
            }
        }
        let ly = MARGIN + 12.0 + 16.0 * k as f64;
        let lx = MARGIN + pw + 10.0;
        let _ = writeln!(s, r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{colour}" stroke-width="2"/>"#, ly - 4.0, lx + 14.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}" font-family="sans-serif" font-size="10">{}</text>"#, lx + 18.0, escape(&ser.name));
    }
    s.push_str("</svg>\n");
    s
}
