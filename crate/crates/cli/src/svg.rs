//! Bare-bones SVG: axes, polylines and a unit circle.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
}

fn polyline(out: &mut String, pts: impl Iterator<Item = (f64, f64)>, color: &str) {
    let coords: Vec<String> = pts.map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        coords.join(" ")
    );
}

/// Line plot of named series sharing one pair of axes.
pub fn line_plot(series: &[(String, Vec<[f64; 2]>)], xlabel: &str, ylabel: &str) -> String {
    let all = series.iter().flat_map(|(_, s)| s.iter()).filter(|p| p[0].is_finite() && p[1].is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut out = String::new();
    header(&mut out, W, H);
    let _ = writeln!(
        out,
        r#"<path d="M{PAD},{} H{} M{PAD},{} V{PAD}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD,
        H - PAD
    );
    for (v, anchor, x, y) in [
        (x0, "start", PAD, H - PAD + 18.0),
        (x1, "end", W - PAD, H - PAD + 18.0),
        (y0, "end", PAD - 6.0, H - PAD),
        (y1, "end", PAD - 6.0, PAD + 4.0),
    ] {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" font-size="12" text-anchor="{anchor}">{v:.3}</text>"#);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        polyline(&mut out, pts.iter().filter(|p| p[1].is_finite()).map(|p| (sx(p[0]), sy(p[1]))), color);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{name}</text>"#,
            W - PAD - 120.0,
            PAD + 16.0 * k as f64
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Paths in the unit disk, drawn with the boundary circle.
pub fn disk_plot(paths: &[Vec<[f64; 2]>], marks: &[[f64; 2]]) -> String {
    let side = 520.0;
    let scale = 0.45 * side;
    let c = 0.5 * side;
    let mut out = String::new();
    header(&mut out, side, side);
    let _ = writeln!(out, r#"<circle cx="{c}" cy="{c}" r="{scale}" fill="none" stroke="black"/>"#);
    for (k, path) in paths.iter().enumerate() {
        polyline(&mut out, path.iter().map(|p| (c + scale * p[0], c - scale * p[1])), COLORS[k % COLORS.len()]);
    }
    for m in marks {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, c + scale * m[0], c - scale * m[1]);
    }
    out.push_str("</svg>\n");
    out
}
