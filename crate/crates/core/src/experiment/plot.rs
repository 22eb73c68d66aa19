//! Two-panel SVG of the bound-to-measurement ratios against `h0`.

use std::fmt::Write as _;
use std::path::Path;

use super::sweep::SweepRow;
use super::ExperimentError;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const TICKS: usize = 5;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn spanning(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0 };
        }
        if hi - lo <= 1e-12 * lo.abs().max(1.0) {
            let pad = 0.5 * lo.abs().max(1.0);
            return Self { lo: lo - pad, hi: hi + pad };
        }
        let pad = 0.05 * (hi - lo);
        Self { lo: lo - pad, hi: hi + pad }
    }

    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }

    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..TICKS).map(move |k| self.lo + (self.hi - self.lo) * k as f64 / (TICKS - 1) as f64)
    }
}

fn panel(svg: &mut String, offset_x: f64, title: &str, ylabel: &str, points: &[(f64, f64)]) {
    let x_axis = Axis::spanning(points.iter().map(|p| p.0));
    let y_axis = Axis::spanning(points.iter().map(|p| p.1));
    let (left, right) = (offset_x + MARGIN_L, offset_x + PANEL_W - MARGIN_R);
    let (top, bottom) = (MARGIN_T, PANEL_H - MARGIN_B);

    let _ = writeln!(svg, r#"<g class="panel">"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{title}</text>"#,
        (left + right) / 2.0,
        MARGIN_T - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for t in x_axis.ticks() {
        let px = x_axis.map(t, left, right);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="10">{t:.3}</text>"#,
            bottom + 18.0
        );
    }
    for t in y_axis.ticks() {
        let py = y_axis.map(t, bottom, top);
        let _ =
            writeln!(svg, r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{t:.3}</text>"#,
            left - 8.0,
            py + 3.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">h0</text>"#,
        (left + right) / 2.0,
        PANEL_H - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 {x:.2} {y:.2})">{ylabel}</text>"#,
        x = offset_x + 18.0,
        y = (top + bottom) / 2.0
    );

    let mapped: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .map(|&(x, y)| (x_axis.map(x, left, right), y_axis.map(y, bottom, top)))
        .collect();
    if mapped.len() > 1 {
        let path: Vec<String> = mapped.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="steelblue"/>"#, path.join(" "));
    }
    for (x, y) in &mapped {
        let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="steelblue"/>"#);
    }
    let _ = writeln!(svg, "</g>");
}

/// Renders the two ratio panels. Rows are drawn in order of increasing `h0`.
pub fn render_svg(rows: &[SweepRow]) -> Result<String, ExperimentError> {
    if rows.is_empty() {
        return Err(ExperimentError::Config("cannot plot an empty sweep".into()));
    }
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.h0.total_cmp(&b.h0));
    let r1: Vec<(f64, f64)> = sorted.iter().map(|r| (r.h0, r.ratio1)).collect();
    let r2: Vec<(f64, f64)> = sorted.iter().map(|r| (r.h0, r.ratio2)).collect();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#,
        w = 2.0 * PANEL_W,
        h = PANEL_H
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    panel(&mut svg, 0.0, "exponential-hopping envelope", "√2·ξ1/ΔX", &r1);
    panel(&mut svg, PANEL_W, "nearest-neighbor envelope", "√2·ξ2/ΔX", &r2);
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes [`render_svg`] output to `path`.
pub fn emit_plot(rows: &[SweepRow], path: &Path) -> Result<(), ExperimentError> {
    let svg = render_svg(rows)?;
    std::fs::write(path, svg).map_err(|e| ExperimentError::io(path, e))
}
