//! Self-contained log-log SVG plots with fixed size and fixed number
//! formatting, so identical data always gives identical bytes.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use gabor_core::deform::{increments, Side, SweepResult};
use gabor_core::modspace::TradeoffTable;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Markers,
    Line,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    /// Least-squares line through the points in log-log coordinates.
    pub fit: bool,
}

/// Slope and intercept of `log y = intercept + slope · log x`.
pub fn loglog_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.log10(), y.log10())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    Some((slope, my - slope * mx))
}

struct Axes {
    x_range: (i32, i32),
    y_range: (i32, i32),
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        let (lo, hi) = (self.x_range.0 as f64, self.x_range.1 as f64);
        MARGIN_LEFT + (x.log10() - lo) / (hi - lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let (lo, hi) = (self.y_range.0 as f64, self.y_range.1 as f64);
        HEIGHT - MARGIN_BOTTOM - (y.log10() - lo) / (hi - lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn decade_range(values: impl Iterator<Item = f64>) -> Option<(i32, i32)> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| *v > 0.0 && v.is_finite()) {
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    if !lo.is_finite() {
        return None;
    }
    let (lo, mut hi) = (lo.floor() as i32, hi.ceil() as i32);
    if hi == lo {
        hi += 1;
    }
    Some((lo, hi))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Log-log plot of positive data; nonpositive points are dropped. Fails
/// when fewer than two points remain.
pub fn loglog_svg(title: &str, x_label: &str, y_label: &str, series: &[Series], notes: &[String]) -> Result<String> {
    let visible = |s: &Series| -> Vec<(f64, f64)> {
        s.points.iter().copied().filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite()).collect()
    };
    let total: usize = series.iter().map(|s| visible(s).len()).sum();
    if total < 2 {
        bail!("plot needs at least two positive data points, got {total}");
    }
    let all: Vec<(f64, f64)> = series.iter().flat_map(visible).collect();
    let axes = Axes {
        x_range: decade_range(all.iter().map(|p| p.0)).expect("nonempty"),
        y_range: decade_range(all.iter().map(|p| p.1)).expect("nonempty"),
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{HEIGHT:.0}" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH:.0}" height="{HEIGHT:.0}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    let _ = writeln!(
        out,
        r##"<path class="frame" d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="#000"/>"##
    );
    for e in axes.x_range.0..=axes.x_range.1 {
        let x = axes.px(10f64.powi(e));
        let _ = writeln!(out, r##"<path class="tick" d="M{x:.2},{y0:.2} L{x:.2},{:.2}" stroke="#000"/>"##, y0 + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{e}</text>"#, y0 + 20.0);
    }
    for e in axes.y_range.0..=axes.y_range.1 {
        let y = axes.py(10f64.powi(e));
        let _ = writeln!(out, r##"<path class="tick" d="M{:.2},{y:.2} L{x0:.2},{y:.2}" stroke="#000"/>"##, x0 - 5.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#, x0 - 8.0, y + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 15.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts = visible(s);
        match s.style {
            Style::Markers => {
                for (x, y) in &pts {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                        axes.px(*x),
                        axes.py(*y)
                    );
                }
            }
            Style::Line => {
                let d: Vec<String> = pts
                    .iter()
                    .enumerate()
                    .map(|(k, (x, y))| format!("{}{:.2},{:.2}", if k == 0 { 'M' } else { 'L' }, axes.px(*x), axes.py(*y)))
                    .collect();
                let _ = writeln!(out, r#"<path class="data" d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.join(" "));
            }
        }
        if s.fit {
            if let Some((slope, intercept)) = loglog_line(&pts) {
                let xs_lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                let xs_hi = pts.iter().map(|p| p.0).fold(0.0, f64::max);
                let y = |x: f64| 10f64.powf(intercept + slope * x.log10());
                let _ = writeln!(
                    out,
                    r#"<path class="fit" d="M{:.2},{:.2} L{:.2},{:.2}" stroke="{color}" stroke-dasharray="6,4" fill="none"/>"#,
                    axes.px(xs_lo),
                    axes.py(y(xs_lo)),
                    axes.px(xs_hi),
                    axes.py(y(xs_hi))
                );
            }
        }
        let ly = MARGIN_TOP + 16.0 * (i as f64 + 1.0);
        let _ = writeln!(out, r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#, x0 + 12.0, ly - 9.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, x0 + 28.0, escape(&s.label));
    }
    for (j, note) in notes.iter().enumerate() {
        let ly = MARGIN_TOP + 16.0 * (series.len() + j + 1) as f64 + 4.0;
        let _ = writeln!(out, r#"<text class="note" x="{:.2}" y="{ly:.2}">{}</text>"#, x0 + 12.0, escape(note));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Increments `|σ(α) − σ(1)|` of both frame bounds against `|1 − α|`, with
/// log-log fitted lines.
pub fn sweep_svg(result: &SweepResult) -> Result<String> {
    let mut series = Vec::new();
    let mut notes = Vec::new();
    for (side, name) in [(Side::A, "A"), (Side::B, "B")] {
        let pts: Vec<(f64, f64)> = increments(result, side)?.into_iter().filter(|(_, inc)| *inc > 0.0).collect();
        if let Some((slope, _)) = loglog_line(&pts) {
            notes.push(format!("slope {name}: {slope:.3}"));
        }
        series.push(Series { label: format!("|{name}(alpha) - {name}(1)|"), points: pts, style: Style::Markers, fit: true });
    }
    loglog_svg("Frame-bound increments", "|1 - alpha|", "increment", &series, &notes)
}

/// Error and growth columns of a tradeoff table against `ε`, one pair of
/// lines per region, with slopes from the table.
pub fn tradeoff_svg(table: &TradeoffTable) -> Result<String> {
    let mut series = Vec::new();
    let mut notes = Vec::new();
    for slopes in &table.slopes {
        let rows: Vec<_> = table.rows.iter().filter(|r| r.region == slopes.region).collect();
        let name = slopes.region.as_str();
        series.push(Series {
            label: format!("{name}: error"),
            points: rows.iter().map(|r| (r.epsilon, r.err_norm_a)).collect(),
            style: Style::Line,
            fit: false,
        });
        series.push(Series {
            label: format!("{name}: growth"),
            points: rows.iter().map(|r| (r.epsilon, r.h_norm_c)).collect(),
            style: Style::Line,
            fit: false,
        });
        notes.push(format!("{name}: error slope {:.3}, growth slope {:.3}", slopes.slope_err, slopes.slope_growth));
    }
    loglog_svg("Truncation tradeoff", "epsilon", "norm", &series, &notes)
}
