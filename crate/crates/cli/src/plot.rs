//! Minimal SVG rendering. Data files are the contract; these are previews.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    s
}

fn axes(s: &mut String, xlabel: &str, ylabel: &str, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) {
    let (l, r, t, b) = (MARGIN, W - 20.0, 30.0, H - MARGIN);
    let _ = writeln!(s, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
    let _ = writeln!(s, r#"<text x="{l}" y="{}">{x0:.6}</text>"#, b + 16.0);
    let _ = writeln!(s, r#"<text x="{r}" y="{}" text-anchor="end">{x1:.6}</text>"#, b + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (l + r) / 2.0, H - 20.0, escape(xlabel));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y1:.4}</text>"#, l - 4.0, t + 10.0);
    let _ = writeln!(s, r#"<text x="{}" y="{b}" text-anchor="end">{y0:.4}</text>"#, l - 4.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let xr = extent(series.iter().flat_map(|s| s.x.iter().copied()));
    let yr = extent(series.iter().flat_map(|s| s.y.iter().copied()));
    let mut s = header(title);
    axes(&mut s, xlabel, ylabel, xr, yr);
    let px = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (W - 20.0 - MARGIN);
    let py = |y: f64| H - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (H - MARGIN - 30.0);
    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = ser
            .x
            .iter()
            .zip(ser.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{color}">{}</text>"#, MARGIN + 8.0, 46.0 + 14.0 * k as f64, escape(ser.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Grey-scale raster of `z[i][j]` (rows along y), downsampled to at most
/// 128 × 128 cells.
pub fn heat_map(title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64), z: &[Vec<f64>]) -> String {
    let mut s = header(title);
    axes(&mut s, xlabel, ylabel, x, y);
    let rows = z.len();
    let cols = z.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        s.push_str("</svg>\n");
        return s;
    }
    let max = z.iter().flatten().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (nr, nc) = (rows.min(128), cols.min(128));
    let (cw, ch) = ((W - 20.0 - MARGIN) / nc as f64, (H - MARGIN - 30.0) / nr as f64);
    for a in 0..nr {
        for b in 0..nc {
            let v = z[a * rows / nr][b * cols / nc] / max;
            let shade = (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8;
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},{shade})"/>"#,
                MARGIN + b as f64 * cw,
                H - MARGIN - (a + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
