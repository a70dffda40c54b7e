//! SVG heatmaps of landscapes.
//!
//! P₂ ∈ [0, 1] maps linearly onto 256 viridis steps. Runs of equal colour
//! within a row are merged into one rectangle.

use std::fmt::Write as _;

use plotters::style::colors::colormaps::{ColorMap, ViridisRGB};
use superbroad_core::landscape::LandscapeGrid;

pub const COLOR_STEPS: usize = 256;

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 400.0;
const LEFT: f64 = 72.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 56.0;
const BAR_GAP: f64 = 24.0;
const BAR_W: f64 = 16.0;
const RIGHT: f64 = 80.0;

pub fn color_index(p: f64) -> usize {
    ((p.clamp(0.0, 1.0) * COLOR_STEPS as f64) as usize).min(COLOR_STEPS - 1)
}

pub fn ramp() -> Vec<String> {
    (0..COLOR_STEPS)
        .map(|k| {
            let c = ViridisRGB.get_color_normalized(k as f64, 0.0, (COLOR_STEPS - 1) as f64);
            format!("#{:02x}{:02x}{:02x}", c.0, c.1, c.2)
        })
        .collect()
}

/// Round tick positions covering `[lo, hi]`, about `target` of them.
pub fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn edges(axis: &[f64]) -> (f64, f64) {
    let n = axis.len();
    let half_lo = 0.5 * (axis[1] - axis[0]);
    let half_hi = 0.5 * (axis[n - 1] - axis[n - 2]);
    (axis[0] - half_lo, axis[n - 1] + half_hi)
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn heatmap_svg(grid: &LandscapeGrid, title: &str) -> String {
    let colors = ramp();
    let width = LEFT + PLOT_W + BAR_GAP + BAR_W + RIGHT;
    let height = TOP + PLOT_H + BOTTOM;
    let (x0, x1) = edges(&grid.detunings);
    let (y0, y1) = edges(&grid.amplitudes);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * PLOT_W;
    let py = |y: f64| TOP + PLOT_H - (y - y0) / (y1 - y0) * PLOT_H;
    let xb: Vec<f64> = (0..=grid.cols())
        .map(|j| match j {
            0 => x0,
            j if j == grid.cols() => x1,
            j => 0.5 * (grid.detunings[j - 1] + grid.detunings[j]),
        })
        .collect();
    let yb: Vec<f64> = (0..=grid.rows())
        .map(|i| match i {
            0 => y0,
            i if i == grid.rows() => y1,
            i => 0.5 * (grid.amplitudes[i - 1] + grid.amplitudes[i]),
        })
        .collect();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for i in 0..grid.rows() {
        let (top, bottom) = (py(yb[i + 1]), py(yb[i]));
        let row = grid.row(i);
        let mut j = 0;
        while j < row.len() {
            let c = color_index(row[j]);
            let mut k = j + 1;
            while k < row.len() && color_index(row[k]) == c {
                k += 1;
            }
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                px(xb[j]),
                top,
                px(xb[k]) - px(xb[j]),
                bottom - top,
                colors[c]
            );
            j = k;
        }
    }
    // colour bar
    let bx = LEFT + PLOT_W + BAR_GAP;
    let step_h = PLOT_H / COLOR_STEPS as f64;
    for (k, c) in colors.iter().enumerate() {
        let y = TOP + PLOT_H - (k + 1) as f64 * step_h;
        let _ = writeln!(s, r#"<rect x="{bx:.2}" y="{y:.3}" width="{BAR_W}" height="{:.3}" fill="{c}"/>"#, step_h + 0.05);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1, 8) {
        let x = px(t);
        let yb = TOP + PLOT_H;
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{yb}" x2="{x:.2}" y2="{:.0}" stroke="black"/>"#, yb + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.0}" text-anchor="middle">{}</text>"#, yb + 18.0, fmt_tick(t));
    }
    for t in ticks(y0, y1, 6) {
        let y = py(t);
        let _ = writeln!(s, r#"<line x1="{:.0}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(s, r#"<text x="{:.0}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, fmt_tick(t));
    }
    for (v, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
        let y = TOP + PLOT_H - v * PLOT_H;
        let _ = writeln!(s, r#"<text x="{:.0}" y="{:.2}">{label}</text>"#, bx + BAR_W + 6.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.0}" y="{:.0}" text-anchor="middle">Detuning Δ/2π (MHz)</text>"#,
        LEFT + 0.5 * PLOT_W,
        height - 14.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.0}) rotate(-90)" text-anchor="middle">Rabi amplitude Ω₀/2π (MHz)</text>"#,
        TOP + 0.5 * PLOT_H
    );
    let _ = writeln!(s, r#"<text x="{:.0}" y="{:.0}" text-anchor="middle">P₂</text>"#, bx + 0.5 * BAR_W, TOP - 8.0);
    let _ = writeln!(s, r#"<text x="{LEFT}" y="22">{}</text>"#, escape(title));
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_has_256_distinct_ends() {
        let r = ramp();
        assert_eq!(r.len(), 256);
        assert_ne!(r[0], r[255]);
        assert!(r.iter().all(|c| c.len() == 7 && c.starts_with('#')));
        assert_eq!(color_index(0.0), 0);
        assert_eq!(color_index(1.0), 255);
        assert_eq!(color_index(0.5), 128);
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(-60.0, 60.0, 8), vec![-60.0, -40.0, -20.0, 0.0, 20.0, 40.0, 60.0]);
        assert_eq!(ticks(0.0, 25.0, 6), vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0]);
    }

    #[test]
    fn svg_is_well_formed_and_deterministic() {
        let grid = LandscapeGrid::new(
            vec![-1.0, 0.0, 1.0],
            vec![0.0, 1.0],
            vec![0.0, 0.0, 0.0, 0.2, 1.0, 0.2],
            "x".into(),
            1.0,
        )
        .unwrap();
        let a = heatmap_svg(&grid, "a <b>");
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert!(a.contains("Detuning Δ/2π (MHz)"));
        assert!(a.contains("a &lt;b&gt;"));
        assert_eq!(a, heatmap_svg(&grid, "a <b>"));
        // first row is one merged run
        assert_eq!(a.matches(r##"fill="#440154""##).count(), 2);
    }
}
