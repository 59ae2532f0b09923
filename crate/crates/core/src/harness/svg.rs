//! Minimal SVG line charts for regret curves.

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Linear,
    Log,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct ChartOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub width: f64,
    pub height: f64,
}

impl Default for ChartOptions {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: "t".into(),
            y_label: "regret / t".into(),
            x_axis: Axis::Log,
            y_axis: Axis::Log,
            width: 640.0,
            height: 420.0,
        }
    }
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];
const MARGIN: (f64, f64, f64, f64) = (60.0, 20.0, 40.0, 50.0); // left, right, top, bottom

fn project(v: f64, axis: Axis) -> Option<f64> {
    match axis {
        Axis::Linear if v.is_finite() => Some(v),
        Axis::Log if v > 0.0 && v.is_finite() => Some(v.log10()),
        _ => None,
    }
}

fn ticks(lo: f64, hi: f64, axis: Axis) -> Vec<(f64, String)> {
    match axis {
        Axis::Log => (lo.ceil() as i32..=hi.floor() as i32)
            .map(|e| (e as f64, format!("1e{e}")))
            .collect(),
        Axis::Linear => (0..=4)
            .map(|i| {
                let v = lo + (hi - lo) * i as f64 / 4.0;
                (v, format!("{v:.3}"))
            })
            .collect(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders `series` into a standalone SVG document. Points that cannot be
/// placed on a log axis are dropped.
pub fn line_chart(series: &[Series], opts: &ChartOptions) -> String {
    let projected: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter_map(|&(x, y)| Some((project(x, opts.x_axis)?, project(y, opts.y_axis)?)))
                .collect()
        })
        .collect();
    let all = projected.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }

    let (l, r, t, b) = MARGIN;
    let pw = opts.width - l - r;
    let ph = opts.height - t - b;
    let sx = |x: f64| l + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| t + ph - (y - y0) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#,
        w = opts.width,
        h = opts.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        opts.width / 2.0,
        escape(&opts.title)
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{l} {t} V{yb} H{xr}" fill="none" stroke="black"/>"#,
        yb = t + ph,
        xr = l + pw
    );
    for (v, label) in ticks(x0, x1, opts.x_axis) {
        let x = sx(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{x:.1}" y2="{y2:.1}" stroke="black"/><text x="{x:.1}" y="{ty:.1}" text-anchor="middle">{label}</text>"#,
            y = t + ph,
            y2 = t + ph + 4.0,
            ty = t + ph + 16.0
        );
    }
    for (v, label) in ticks(y0, y1, opts.y_axis) {
        let y = sy(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{x1:.1}" y1="{y:.1}" x2="{l:.1}" y2="{y:.1}" stroke="black"/><text x="{tx:.1}" y="{ty:.1}" text-anchor="end">{label}</text>"#,
            x1 = l - 4.0,
            tx = l - 6.0,
            ty = y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        l + pw / 2.0,
        opts.height - 8.0,
        escape(&opts.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{y}" text-anchor="middle" transform="rotate(-90 14 {y})">{}</text>"#,
        escape(&opts.y_label),
        y = t + ph / 2.0
    );

    for (i, (s, pts)) in series.iter().zip(&projected).enumerate() {
        let color = COLORS[i % COLORS.len()];
        if !pts.is_empty() {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = t + 14.0 * (i as f64 + 1.0);
        let _ = writeln!(
            svg,
            r#"<line x1="{a:.1}" y1="{ly:.1}" x2="{b:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{c:.1}" y="{ty:.1}">{}</text>"#,
            escape(&s.label),
            a = l + pw - 120.0,
            b = l + pw - 100.0,
            c = l + pw - 95.0,
            ty = ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Thins a dense curve to at most `max_points` roughly log-spaced points.
pub fn log_thin(points: &[(f64, f64)], max_points: usize) -> Vec<(f64, f64)> {
    if points.len() <= max_points || max_points < 2 {
        return points.to_vec();
    }
    let n = points.len();
    let mut idx: Vec<usize> = (0..max_points)
        .map(|i| {
            let f = i as f64 / (max_points - 1) as f64;
            ((n as f64).powf(f).round() as usize).clamp(1, n) - 1
        })
        .collect();
    idx.dedup();
    idx.into_iter().map(|i| points[i]).collect()
}
