//! Minimal SVG line plots: plain `<path>` elements, no scripts.

use std::fmt::Write;

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Plot the series in a common frame. With `equal_axes` both axes share
/// one scale, for drawing curves in the plane.
pub fn plot(title: &str, series: &[Series], equal_axes: bool) -> String {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let mut sx = w / (x1 - x0).max(1e-300);
    let mut sy = h / (y1 - y0).max(1e-300);
    if (y1 - y0) < 1e-12 * (1.0 + y1.abs()) {
        sy = 1.0;
    }
    if equal_axes {
        sx = sx.min(sy);
        sy = sx;
    }
    let map = |x: f64, y: f64| (MARGIN + (x - x0) * sx, HEIGHT - MARGIN - (y - y0) * sy);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(title)
    );
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (k, &(x, y)) in s.points.iter().enumerate() {
            let (px, py) = map(x, y);
            let _ = write!(d, "{}{:.3},{:.3} ", if k == 0 { "M" } else { "L" }, px, py);
        }
        if s.closed {
            d.push('Z');
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.2"/>"#,
            d.trim_end(),
            s.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{}">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            40.0 + 14.0 * i as f64,
            s.color,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_only() {
        let s = plot(
            "t <1>",
            &[Series {
                label: "a".into(),
                color: "black",
                points: vec![(0.0, 0.0), (1.0, 2.0)],
                closed: true,
            }],
            true,
        );
        assert!(s.contains("<path d=\"M"));
        assert!(s.contains("&lt;1&gt;"));
        assert!(!s.contains("<script"));
    }
}
