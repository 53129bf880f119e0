//! Dilation sweeps `α ↦ (A(αΛ), B(αΛ))`, Hölder-exponent fits, the
//! exponent law `γ(s)`, bound checks, and the Gaussian saturation
//! experiment.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::{periodized_frame_bounds, rel_separation, snap_alpha_to_torus, AtomSet, BoundsMethod};
use crate::grid::PhaseSpaceGrid;
use crate::modspace::{mixed_norm_signal_in_box, MixedNormParams};
use crate::signal::SampledSignal;
use crate::window::{Window, WindowSpec};
use crate::zak::zak_square_lattice_bounds;

/// Rows with `|1 − α|` inside this window enter fits and bound checks.
pub const FIT_WINDOW: (f64, f64) = (1e-3, 0.25);

/// Increments below this fraction of `B(1)` are roundoff and count as zero.
pub const INCREMENT_FLOOR: f64 = 1e-12;

/// Largest accepted spread (max/median) of bound-check ratios.
pub const MAX_RATIO_SPREAD: f64 = 5.0;

/// Sweep parameters must satisfy `MIN_ALPHA < α < MAX_ALPHA`.
pub const MIN_ALPHA: f64 = 0.75;
pub const MAX_ALPHA: f64 = 2.0;

/// Hölder exponent guaranteed for windows in `M^1_s`:
/// `s/(2(4−3s))` for `0 < s < 1`, `s/2` for `1 ≤ s ≤ 2`, `1` beyond.
pub fn gamma(s: f64) -> Result<f64> {
    if !(s > 0.0) || s.is_nan() {
        return Err(Error::Parameter(format!("smoothness class must be positive, got {s}")));
    }
    Ok(if s < 1.0 {
        s / (2.0 * (4.0 - 3.0 * s))
    } else if s <= 2.0 {
        s / 2.0
    } else {
        1.0
    })
}

/// `δ = α^{-2} − 1`, the symbol-side deformation parameter of `αΛ`.
pub fn delta_of_alpha(alpha: f64) -> f64 {
    alpha.powi(-2) - 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    /// Exact periodic Gabor system on the dilated torus; `α` is snapped so
    /// that `α²·area` is an integer.
    Dense,
    /// Fiber-matrix oracle on `α'ℤ²` with `α'²` the nearest fraction of
    /// denominator at most 64; the node set must be integer-valued.
    ZakSnap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub window: WindowSpec,
    pub atoms: AtomSet,
    pub alphas: Vec<f64>,
    pub method: SweepMethod,
    /// Smoothness class `s` claimed for the window.
    pub s_class: f64,
    /// Fiber sampling per axis for the lattice oracle.
    #[serde(default = "default_zak_resolution")]
    pub zak_resolution: usize,
}

fn default_zak_resolution() -> usize {
    32
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        if self.alphas.is_empty() {
            return Err(Error::Parameter("alphas must not be empty".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > MIN_ALPHA && **a < MAX_ALPHA)) {
            return Err(Error::Parameter(format!("alpha {a} outside ({MIN_ALPHA}, {MAX_ALPHA})")));
        }
        if self.alphas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("alphas must be strictly increasing".into()));
        }
        if !self.alphas.contains(&1.0) {
            return Err(Error::Parameter("alphas must include 1".into()));
        }
        if !(self.s_class > 0.0) {
            return Err(Error::Parameter(format!("s_class must be positive, got {}", self.s_class)));
        }
        match self.method {
            SweepMethod::Dense => {
                if self.atoms.periodic_box().is_none() {
                    return Err(Error::Parameter("the dense sweep needs a periodic node set".into()));
                }
            }
            SweepMethod::ZakSnap => {
                let integer = self.atoms.points().iter().all(|p| p.x.fract() == 0.0 && p.omega.fract() == 0.0);
                if !integer || self.atoms.is_empty() {
                    return Err(Error::Parameter("the lattice oracle needs a patch of the integer lattice".into()));
                }
                if self.zak_resolution < 2 {
                    return Err(Error::Parameter("zak_resolution must be at least 2".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub alpha_used: f64,
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub method: BoundsMethod,
    #[serde(rename = "L")]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub rel: f64,
    pub s_class: f64,
}

impl SweepResult {
    /// The row computed at `α = 1`.
    pub fn reference(&self) -> Result<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.alpha_used == 1.0)
            .ok_or_else(|| Error::Parameter("sweep has no row at alpha = 1".into()))
    }
}

/// Frame bounds of `G(g, αΛ)` for every configured `α`, in parallel; rows
/// are returned in `α` order.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let window = cfg.window.build()?;
    let rel = rel_separation(&cfg.atoms);
    let rows: Vec<SweepRow> = cfg
        .alphas
        .par_iter()
        .map(|&alpha| {
            sweep_row(cfg, &window, alpha).map_err(|e| Error::SweepStep { alpha, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult { rows, rel, s_class: cfg.s_class })
}

fn sweep_row(cfg: &SweepConfig, window: &Window, alpha: f64) -> Result<SweepRow> {
    match cfg.method {
        SweepMethod::Dense => {
            let pbox = cfg.atoms.periodic_box().expect("validated");
            let used = snap_alpha_to_torus(pbox, alpha);
            let b = periodized_frame_bounds(window, &cfg.atoms, used)?;
            Ok(SweepRow { alpha, alpha_used: used, lower: b.lower, upper: b.upper, method: b.method, samples: b.samples })
        }
        SweepMethod::ZakSnap => {
            let (b, used) = zak_square_lattice_bounds(window, alpha, cfg.zak_resolution, 2)?;
            Ok(SweepRow { alpha, alpha_used: used, lower: b.lower, upper: b.upper, method: b.method, samples: b.samples })
        }
    }
}

/// Which frame bound a fit or check refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl SweepRow {
    pub fn bound(&self, side: Side) -> f64 {
        match side {
            Side::A => self.lower,
            Side::B => self.upper,
        }
    }
}

/// Increments `(|1 − α|, |σ(α) − σ(1)|)` of the rows inside the fit window;
/// increments below [`INCREMENT_FLOOR`]`·B(1)` are reported as zero.
pub fn increments(result: &SweepResult, side: Side) -> Result<Vec<(f64, f64)>> {
    let reference = result.reference()?;
    let floor = INCREMENT_FLOOR * reference.upper;
    let value = reference.bound(side);
    Ok(result
        .rows
        .iter()
        .map(|r| {
            let inc = (r.bound(side) - value).abs();
            ((1.0 - r.alpha_used).abs(), if inc <= floor { 0.0 } else { inc })
        })
        .filter(|(d, _)| *d >= FIT_WINDOW.0 && *d <= FIT_WINDOW.1)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub exponent: f64,
    pub constant: f64,
    pub r2: f64,
    pub rows: usize,
}

/// Least-squares fit of `log |σ(α) − σ(1)| = log C + e·log|1 − α|` over the
/// fit window; rows with zero increment carry no exponent information and
/// are skipped.
pub fn holder_fit(result: &SweepResult, side: Side) -> Result<HolderFit> {
    let pts: Vec<(f64, f64)> = increments(result, side)?
        .into_iter()
        .filter(|(_, inc)| *inc > 0.0)
        .map(|(d, inc)| (d.ln(), inc.ln()))
        .collect();
    fit_line(&pts)
}

fn fit_line(pts: &[(f64, f64)]) -> Result<HolderFit> {
    if pts.len() < 4 {
        return Err(Error::DegenerateFit(format!("{} usable rows, need at least 4", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("all rows share one |1 − α|".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok(HolderFit { exponent: slope, constant: intercept.exp(), r2, rows: pts.len() })
}

/// Spread of the ratios `|Δσ| / (rel · |1−α|^e · ‖g‖²)` for one bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideCheck {
    pub side: Side,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub spread: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub exponent: f64,
    pub rel: f64,
    pub window_norm_sq: f64,
    pub sides: Vec<SideCheck>,
    pub pass: bool,
}

/// Checks that `|Δσ±| ≤ C · rel · |1−α|^{exponent} · ‖g‖²` holds with one
/// constant across the fit window: PASS iff, for both bounds, the largest
/// positive ratio is at most [`MAX_RATIO_SPREAD`] times their median. A bound
/// whose increments all vanish passes trivially.
pub fn bound_check_with_exponent(
    result: &SweepResult,
    exponent: f64,
    rel: f64,
    window_norm_sq: f64,
) -> Result<BoundReport> {
    if !(rel > 0.0 && window_norm_sq > 0.0) {
        return Err(Error::Parameter("rel and the window norm must be positive".into()));
    }
    let mut sides = Vec::new();
    for side in [Side::A, Side::B] {
        let ratios: Vec<f64> = increments(result, side)?
            .into_iter()
            .map(|(d, inc)| inc / (rel * d.powf(exponent) * window_norm_sq))
            .collect();
        let mut positive: Vec<f64> = ratios.iter().copied().filter(|r| *r > 0.0).collect();
        positive.sort_by(f64::total_cmp);
        let (max_ratio, spread) = if positive.is_empty() {
            (0.0, 1.0)
        } else {
            let n = positive.len();
            let median = if n % 2 == 1 { positive[n / 2] } else { 0.5 * (positive[n / 2 - 1] + positive[n / 2]) };
            (positive[n - 1], positive[n - 1] / median)
        };
        sides.push(SideCheck { side, ratios, max_ratio, spread, pass: spread <= MAX_RATIO_SPREAD });
    }
    let pass = sides.iter().all(|s| s.pass);
    Ok(BoundReport { exponent, rel, window_norm_sq, sides, pass })
}

/// [`bound_check_with_exponent`] at the exponent `γ(s)`, with `rel(Λ)` and
/// `‖g‖²_{M^1_s}` computed from the inputs. The norm is taken over the
/// phase-space box of `psgrid`; it only scales the ratios, so the spread
/// and the verdict do not depend on how much of a slowly decaying window
/// lies outside the box.
pub fn bound_check(
    result: &SweepResult,
    s: f64,
    g: &SampledSignal,
    atoms: &AtomSet,
    psgrid: &PhaseSpaceGrid,
) -> Result<BoundReport> {
    let (norm, _) = mixed_norm_signal_in_box(g, &MixedNormParams::feichtinger(s), psgrid)?;
    bound_check_with_exponent(result, gamma(s)?, rel_separation(atoms), norm * norm)
}

/// Default dilation grid of the saturation experiment.
pub fn saturation_alphas() -> Vec<f64> {
    let mut a: Vec<f64> = (0..7).map(|i| 0.85 + 0.02 * i as f64).collect();
    a.push(0.99);
    a.push(1.0);
    a.push(1.05);
    a
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationLevel {
    pub resolution: usize,
    pub rows: Vec<SweepRow>,
    pub exponent_a: f64,
    pub constant_a: f64,
    pub r2: f64,
    /// Least-squares slope of `A` against `α` left of 1.
    pub left_slope: f64,
    /// Largest `A/B` over rows with `α ≥ 1`.
    pub max_ratio_right: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub levels: Vec<SaturationLevel>,
    pub exponent_range: (f64, f64),
    pub exponent_stability: f64,
    pub pass: bool,
}

/// Lower frame bound of the Gaussian on `αℤ²` at several fiber resolutions:
/// fits the exponent of `A(α)` as `α → 1⁻` and checks that `A` vanishes for
/// `α ≥ 1`. PASS iff the finest exponent lies in `[0.85, 1.15]`, the two
/// finest exponents agree within 0.05, and `A ≤ 1e-3·B` for `α ≥ 1`.
pub fn saturation_experiment(res_levels: &[usize], alphas: &[f64]) -> Result<SaturationReport> {
    if res_levels.is_empty() {
        return Err(Error::Parameter("at least one resolution level is required".into()));
    }
    let window = Window::gaussian();
    let levels: Vec<SaturationLevel> = res_levels
        .iter()
        .map(|&res| {
            let rows: Vec<SweepRow> = alphas
                .par_iter()
                .map(|&alpha| {
                    let (b, used) = zak_square_lattice_bounds(&window, alpha, res, 2)
                        .map_err(|e| Error::SweepStep { alpha, source: Box::new(e) })?;
                    Ok(SweepRow {
                        alpha,
                        alpha_used: used,
                        lower: b.lower,
                        upper: b.upper,
                        method: b.method,
                        samples: b.samples,
                    })
                })
                .collect::<Result<_>>()?;
            let left: Vec<&SweepRow> = rows.iter().filter(|r| r.alpha_used < 1.0).collect();
            let pts: Vec<(f64, f64)> = left
                .iter()
                .filter(|r| r.lower > 0.0)
                .map(|r| ((1.0 - r.alpha_used).ln(), r.lower.ln()))
                .collect();
            let fit = fit_line(&pts)?;
            let lin: Vec<(f64, f64)> = left.iter().map(|r| (r.alpha_used, r.lower)).collect();
            let left_slope = fit_line(&lin).map(|f| f.exponent).unwrap_or(f64::NAN);
            let max_ratio_right = rows
                .iter()
                .filter(|r| r.alpha_used >= 1.0)
                .map(|r| r.lower / r.upper)
                .fold(0.0, f64::max);
            Ok(SaturationLevel {
                resolution: res,
                rows,
                exponent_a: fit.exponent,
                constant_a: fit.constant,
                r2: fit.r2,
                left_slope,
                max_ratio_right,
            })
        })
        .collect::<Result<_>>()?;
    let finest = levels.last().expect("non-empty");
    let stability = if levels.len() >= 2 {
        (finest.exponent_a - levels[levels.len() - 2].exponent_a).abs()
    } else {
        f64::NAN
    };
    let range = (0.85, 1.15);
    let pass = finest.exponent_a >= range.0
        && finest.exponent_a <= range.1
        && stability <= 0.05
        && levels.iter().all(|l| l.max_ratio_right <= 1e-3);
    Ok(SaturationReport { levels, exponent_range: range, exponent_stability: stability, pass })
}
