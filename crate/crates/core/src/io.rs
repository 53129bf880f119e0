//! CSV encodings of signals, phase-space functions, node sets, operators,
//! sweeps and tradeoff tables. Floats are written in scientific notation
//! with 17 significant digits, which round-trips every `f64`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::deform::SweepResult;
use crate::error::{Error, Result};
use crate::gabor::AtomSet;
use crate::grid::{GridSpec, TFPoint};
use crate::modspace::TradeoffTable;
use crate::signal::{PhaseSpaceFunction, SampledSignal};
use crate::weyl::OperatorMatrix;

/// Fixed 17-significant-digit scientific formatting.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // avoid "-0" so that output bytes do not depend on the sign of zero
        return format!("{:.16e}", 0.0);
    }
    format!("{v:.16e}")
}

pub const SIGNAL_HEADER: &str = "index,t,re,im";
pub const PHASE_SPACE_HEADER: &str = "ix,iw,x,omega,re,im";
pub const ATOMS_HEADER: &str = "x,omega";
pub const OPERATOR_HEADER: &str = "row,col,re,im";
pub const SWEEP_HEADER: &str = "alpha,alpha_used,A,B,method,L";
pub const TRADEOFF_HEADER: &str = "epsilon,region,err_norm_a,h_norm_c,slope_err,slope_growth";

pub fn signal_to_csv(f: &SampledSignal) -> String {
    let mut out = String::from(SIGNAL_HEADER);
    out.push('\n');
    for (n, (t, v)) in f.grid().times().zip(f.samples()).enumerate() {
        let _ = writeln!(out, "{n},{},{},{}", fmt_f64(t), fmt_f64(v.re), fmt_f64(v.im));
    }
    out
}

fn data_lines<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, &'a str)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == header => Ok(lines),
        Some((_, h)) => Err(Error::InvalidInput(format!("expected header `{header}`, found `{}`", h.trim()))),
        None => Err(Error::InvalidInput("empty CSV input".into())),
    }
}

fn fields<const N: usize>(line: &str, lineno: usize) -> Result<[&str; N]> {
    let parts: Vec<&str> = line.split(',').map(str::trim).collect();
    parts
        .try_into()
        .map_err(|p: Vec<&str>| Error::InvalidInput(format!("line {}: expected {N} fields, found {}", lineno + 1, p.len())))
}

fn number(s: &str, lineno: usize) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::InvalidInput(format!("line {}: `{s}` is not a number", lineno + 1)))
}

/// Reads a signal written by [`signal_to_csv`]; the time column must match
/// `grid` to within a millionth of a sample.
pub fn signal_from_csv(text: &str, grid: GridSpec) -> Result<SampledSignal> {
    let mut samples = Vec::with_capacity(grid.len());
    for (lineno, line) in data_lines(text, SIGNAL_HEADER)? {
        let [idx, t, re, im] = fields::<4>(line, lineno)?;
        let idx: usize =
            idx.parse().map_err(|_| Error::InvalidInput(format!("line {}: bad index `{idx}`", lineno + 1)))?;
        if idx != samples.len() {
            return Err(Error::InvalidInput(format!("line {}: index {idx} out of order", lineno + 1)));
        }
        if idx < grid.len() && (number(t, lineno)? - grid.time(idx)).abs() > 1e-6 * grid.dt() {
            return Err(Error::InvalidInput(format!("line {}: time {t} does not match the grid", lineno + 1)));
        }
        samples.push(Complex64::new(number(re, lineno)?, number(im, lineno)?));
    }
    SampledSignal::new(grid, samples)
}

pub fn phase_space_to_csv(f: &PhaseSpaceFunction) -> String {
    let ps = f.psgrid();
    let mut out = String::from(PHASE_SPACE_HEADER);
    out.push('\n');
    for m in 0..ps.nx() {
        for k in 0..ps.nw() {
            let v = f.get(m, k);
            let _ = writeln!(
                out,
                "{m},{k},{},{},{},{}",
                fmt_f64(ps.x(m)),
                fmt_f64(ps.omega(k)),
                fmt_f64(v.re),
                fmt_f64(v.im)
            );
        }
    }
    out
}

pub fn atoms_to_csv(set: &AtomSet) -> String {
    let mut out = String::from(ATOMS_HEADER);
    out.push('\n');
    for p in set.points() {
        let _ = writeln!(out, "{},{}", fmt_f64(p.x), fmt_f64(p.omega));
    }
    out
}

pub fn atoms_from_csv(text: &str) -> Result<AtomSet> {
    let mut points = Vec::new();
    for (lineno, line) in data_lines(text, ATOMS_HEADER)? {
        let [x, w] = fields::<2>(line, lineno)?;
        points.push(TFPoint::new(number(x, lineno)?, number(w, lineno)?));
    }
    AtomSet::new(points)
}

/// Upper triangle of an operator, row-major.
pub fn operator_to_csv(t: &OperatorMatrix) -> String {
    let mut out = String::from(OPERATOR_HEADER);
    out.push('\n');
    let e = t.entries();
    for r in 0..t.dim() {
        for c in r..t.dim() {
            let v = e[(r, c)];
            let _ = writeln!(out, "{r},{c},{},{}", fmt_f64(v.re), fmt_f64(v.im));
        }
    }
    out
}

pub fn sweep_to_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(r.alpha),
            fmt_f64(r.alpha_used),
            fmt_f64(r.lower),
            fmt_f64(r.upper),
            r.method.as_str(),
            r.samples
        );
    }
    out
}

pub fn tradeoff_to_csv(table: &TradeoffTable) -> String {
    let mut out = String::from(TRADEOFF_HEADER);
    out.push('\n');
    for r in &table.rows {
        let slopes = table.slopes_for(r.region);
        let (se, sg) = slopes.map(|s| (s.slope_err, s.slope_growth)).unwrap_or((f64::NAN, f64::NAN));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(r.epsilon),
            r.region.as_str(),
            fmt_f64(r.err_norm_a),
            fmt_f64(r.h_norm_c),
            fmt_f64(se),
            fmt_f64(sg)
        );
    }
    out
}
