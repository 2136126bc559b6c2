//! Minimal hand-written SVG plots.

use std::fmt::Write;

use qha::tf::GridFunction;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MAX_HEATMAP_SIDE: usize = 128;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.into(), points, dashed: false }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let pts = series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    (x0, x1, y0, y1)
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    s
}

pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x0, x1, y0, y1) = bounds(series);
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;
    let mut s = header(title);
    let _ = writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{fx:.3}</text>"#, px(fx), HEIGHT - MARGIN + 16.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{fy:.3}</text>"#, MARGIN - 6.0, py(fy) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 16.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let dash = if ser.dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#, pts.join(" "));
        let ly = MARGIN + 14.0 + 16.0 * i as f64;
        let lx = WIDTH - MARGIN - 150.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"{dash}/>"#, ly - 4.0, lx + 20.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 26.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

fn shade(v: f64) -> String {
    // white → dark blue
    let t = v.clamp(0.0, 1.0);
    let r = (255.0 * (1.0 - t)) as u8;
    let g = (255.0 * (1.0 - 0.8 * t)) as u8;
    let b = (255.0 * (1.0 - 0.45 * t)) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heatmap of a grid function with the origin at the centre, time lag to the
/// right and frequency upwards. Large grids are block-averaged.
pub fn heatmap(title: &str, f: &GridFunction) -> String {
    let grid = f.phase_grid();
    let d = grid.dim();
    let block = d.div_ceil(MAX_HEATMAP_SIDE);
    let side = d.div_ceil(block);
    let mut cells = vec![0.0; side * side];
    let mut counts = vec![0usize; side * side];
    for z in grid.points() {
        let a = (grid.centered_index(z.m) + (d as i64 - 1) / 2).rem_euclid(d as i64) as usize / block;
        let b = (grid.centered_index(z.n) + (d as i64 - 1) / 2).rem_euclid(d as i64) as usize / block;
        cells[b * side + a] += f.get(z);
        counts[b * side + a] += 1;
    }
    for (c, k) in cells.iter_mut().zip(&counts) {
        if *k > 0 {
            *c /= *k as f64;
        }
    }
    let max = cells.iter().cloned().fold(0.0, f64::max);
    let scale = if max > 0.0 { 1.0 / max } else { 1.0 };
    let plot = HEIGHT - 2.0 * MARGIN;
    let px = plot / side as f64;
    let x0 = (WIDTH - plot) / 2.0;
    let mut s = header(title);
    for b in 0..side {
        for a in 0..side {
            let v = cells[b * side + a] * scale;
            if v <= 0.0 {
                continue;
            }
            let x = x0 + a as f64 * px;
            let y = HEIGHT - MARGIN - (b + 1) as f64 * px;
            let _ = writeln!(s, r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#, px + 0.05, px + 0.05, shade(v));
        }
    }
    let _ = writeln!(s, r#"<rect x="{x0}" y="{MARGIN}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">time</text>"#, WIDTH / 2.0, HEIGHT - MARGIN + 20.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">frequency</text>"#,
        x0 - 12.0,
        HEIGHT / 2.0,
        x0 - 12.0,
        HEIGHT / 2.0
    );
    s.push_str("</svg>\n");
    s
}
