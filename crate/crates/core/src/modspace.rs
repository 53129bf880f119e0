//! Weighted mixed-norm modulation-space norms of signals and phase-space
//! symbols, dilations, and frequency-truncation approximants.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{GridSpec, PhaseSpaceGrid, TFPoint};
use crate::resample::dilate_samples;
use crate::signal::{PhaseSpaceFunction, SampledSignal};
use crate::tfcore::{istft, stft};
use crate::window::{gaussian, make_window, Window, WindowKind, WindowSpec};

/// Dilation factors outside `[MIN_DILATION, MAX_DILATION]` are rejected.
pub const MIN_DILATION: f64 = 0.25;
pub const MAX_DILATION: f64 = 4.0;

/// Weighted mass allowed on the boundary ring of a phase-space grid,
/// relative to the total.
pub const COVERAGE_TOLERANCE: f64 = 1e-6;

/// Lebesgue exponent of one mixed-norm axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exponent {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Infinity,
}

impl Exponent {
    pub fn as_str(self) -> &'static str {
        match self {
            Exponent::One => "1",
            Exponent::Two => "2",
            Exponent::Infinity => "inf",
        }
    }
}

/// `‖F‖ = ‖ ‖F(·, ω)(1+|·|)^s‖_{L^p} (1+|ω|)^t ‖_{L^q}`: inner norm over
/// position, outer norm over frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedNormParams {
    pub p: Exponent,
    pub q: Exponent,
    pub s: f64,
    pub t: f64,
}

impl MixedNormParams {
    pub fn new(p: Exponent, q: Exponent, s: f64, t: f64) -> Result<Self> {
        if !(s.is_finite() && t.is_finite()) {
            return Err(Error::Parameter(format!("weights must be finite, got s={s}, t={t}")));
        }
        Ok(Self { p, q, s, t })
    }

    /// `M^{∞,1}_{0,s}`.
    pub fn sjostrand(s: f64) -> Self {
        Self { p: Exponent::Infinity, q: Exponent::One, s: 0.0, t: s }
    }

    /// `M^1_s` with the weight `(1+|x|)^s (1+|ω|)^s`.
    pub fn feichtinger(s: f64) -> Self {
        Self { p: Exponent::One, q: Exponent::One, s, t: s }
    }

    /// `M^2 = L^2`.
    pub fn l2() -> Self {
        Self { p: Exponent::Two, q: Exponent::Two, s: 0.0, t: 0.0 }
    }
}

fn lp_sum(values: impl Iterator<Item = f64>, p: Exponent, measure: f64) -> f64 {
    match p {
        Exponent::Infinity => values.fold(0.0, f64::max),
        Exponent::One => values.sum::<f64>() * measure,
        Exponent::Two => (values.map(|v| v * v).sum::<f64>() * measure).sqrt(),
    }
}

/// Mixed norm of phase-space samples with Riemann weights `dx`, `dω`.
pub fn mixed_norm_of(values: &PhaseSpaceFunction, params: &MixedNormParams) -> f64 {
    let ps = values.psgrid();
    let (nx, nw) = (ps.nx(), ps.nw());
    let wx: Vec<f64> = (0..nx).map(|m| (1.0 + ps.x(m).abs()).powf(params.s)).collect();
    let inner: Vec<f64> = (0..nw)
        .map(|k| {
            let col = (0..nx).map(|m| values.get(m, k).norm() * wx[m]);
            lp_sum(col, params.p, ps.dx()) * (1.0 + ps.omega(k).abs()).powf(params.t)
        })
        .collect();
    lp_sum(inner.into_iter(), params.q, ps.dw())
}

/// Width of the boundary ring used by the coverage check.
fn ring_width(ps: &PhaseSpaceGrid) -> (f64, f64) {
    ((2.0 * ps.dx()).max(1.0), (2.0 * ps.dw()).max(1.0))
}

/// Fraction of the weighted mass `Σ |F| (1+|x|)^s (1+|ω|)^t` that lies on
/// the boundary ring of the grid.
pub fn boundary_mass_ratio(values: &PhaseSpaceFunction, params: &MixedNormParams) -> f64 {
    let ps = values.psgrid();
    let (hx, hw) = ps.half_widths();
    let (rx, rw) = ring_width(ps);
    let (mut ring, mut total) = (0.0, 0.0);
    for m in 0..ps.nx() {
        let x = ps.x(m);
        let wx = (1.0 + x.abs()).powf(params.s);
        for k in 0..ps.nw() {
            let w = ps.omega(k);
            let v = values.get(m, k).norm() * wx * (1.0 + w.abs()).powf(params.t);
            total += v;
            if x.abs() >= hx - rx || w.abs() >= hw - rw {
                ring += v;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        ring / total
    }
}

fn check_coverage(values: &PhaseSpaceFunction, params: &MixedNormParams) -> Result<()> {
    let ratio = boundary_mass_ratio(values, params);
    if ratio > COVERAGE_TOLERANCE {
        return Err(Error::Coverage { ratio });
    }
    Ok(())
}

/// `‖f‖_{M^{p,q}_{s,t}}` with the Gaussian analysis window.
pub fn mixed_norm_signal(f: &SampledSignal, params: &MixedNormParams, psgrid: &PhaseSpaceGrid) -> Result<f64> {
    let phi = make_window(&WindowKind::Analytic(WindowSpec::Gaussian), *f.grid())?;
    mixed_norm_signal_with_window(f, &phi, params, psgrid)
}

/// Mixed norm of `V_φ f` restricted to the grid box, without the coverage
/// check, together with the boundary mass ratio. For windows with
/// power-law tails this is the norm of the part of the STFT inside the box.
pub fn mixed_norm_signal_in_box(f: &SampledSignal, params: &MixedNormParams, psgrid: &PhaseSpaceGrid) -> Result<(f64, f64)> {
    let phi = make_window(&WindowKind::Analytic(WindowSpec::Gaussian), *f.grid())?;
    let v = stft(f, &phi, psgrid)?;
    Ok((mixed_norm_of(&v, params), boundary_mass_ratio(&v, params)))
}

/// Mixed norm of `V_g f` for an arbitrary analysis window `g`.
pub fn mixed_norm_signal_with_window(
    f: &SampledSignal,
    g: &SampledSignal,
    params: &MixedNormParams,
    psgrid: &PhaseSpaceGrid,
) -> Result<f64> {
    let v = stft(f, g, psgrid)?;
    check_coverage(&v, params)?;
    Ok(mixed_norm_of(&v, params))
}

/// Sampling of the four-dimensional STFT used for symbol norms: analysis
/// positions every `position_step` over the symbol's box, local patches of
/// `patch × patch` samples at spacing `sample_step`, and frequencies kept
/// every `freq_step` inside `[-1/(2·sample_step), 1/(2·sample_step))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolNormGrid {
    pub position_step: f64,
    pub sample_step: f64,
    pub patch: usize,
    pub freq_step: f64,
}

impl SymbolNormGrid {
    /// 32 positions and 32 frequencies per axis on the default box.
    pub fn coarse() -> Self {
        Self { position_step: 0.5, sample_step: 1.0 / 16.0, patch: 128, freq_step: 0.5 }
    }

    /// Doubled resolution in both position and frequency.
    pub fn refined() -> Self {
        Self { position_step: 0.25, sample_step: 1.0 / 16.0, patch: 256, freq_step: 0.25 }
    }
}

impl Default for SymbolNormGrid {
    fn default() -> Self {
        Self::coarse()
    }
}

fn ratio_to_int(num: f64, den: f64) -> Option<usize> {
    let r = num / den;
    let n = r.round();
    ((r - n).abs() < 1e-9 * r.max(1.0) && n >= 1.0).then_some(n as usize)
}

/// Magnitudes `|V_Φ F(z, ζ)|` of the STFT of a symbol with the separable
/// Gaussian window `Φ(x, ω) = φ(x) φ(ω)`, as a list of position rows, each
/// holding the kept frequencies, together with the node coordinates.
struct SymbolStft {
    positions: Vec<TFPoint>,
    freqs: Vec<TFPoint>,
    magnitudes: Vec<Vec<f64>>,
}

fn symbol_stft(f: &PhaseSpaceFunction, res: &SymbolNormGrid) -> Result<SymbolStft> {
    let ps = *f.psgrid();
    let h = res.sample_step;
    let sx = ratio_to_int(h, ps.dx());
    let sw = ratio_to_int(h, ps.dw());
    let (sx, sw) = match (sx, sw) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::IncompatibleGrids(format!(
                "symbol steps ({}, {}) do not divide the norm sampling step {h}",
                ps.dx(),
                ps.dw()
            )))
        }
    };
    let n = res.patch;
    let (hx, hw) = ps.half_widths();
    let npx = ratio_to_int(2.0 * hx, res.position_step)
        .ok_or_else(|| Error::IncompatibleGrids("position step does not divide the symbol box".into()))?;
    let npw = ratio_to_int(2.0 * hw, res.position_step)
        .ok_or_else(|| Error::IncompatibleGrids("position step does not divide the symbol box".into()))?;
    let positions: Vec<TFPoint> = (0..npx)
        .flat_map(|i| {
            (0..npw).map(move |j| TFPoint::new(-hx + i as f64 * res.position_step, -hw + j as f64 * res.position_step))
        })
        .collect();
    // kept FFT bins: ζ = j/(n h) on multiples of freq_step
    let fft_step = 1.0 / (n as f64 * h);
    let keep_every = ratio_to_int(res.freq_step, fft_step)
        .ok_or_else(|| Error::IncompatibleGrids("frequency step is not a multiple of the patch resolution".into()))?;
    let kept: Vec<(usize, f64)> = (0..n)
        .filter_map(|j| {
            let k = fft::signed_index(j, n);
            (k % keep_every as i64 == 0).then_some((j, k as f64 * fft_step))
        })
        .collect();
    let mut freqs = Vec::with_capacity(kept.len() * kept.len());
    for (_, zx) in &kept {
        for (_, zw) in &kept {
            freqs.push(TFPoint::new(*zx, *zw));
        }
    }
    let taper: Vec<f64> = (0..n).map(|j| gaussian((j as f64 - (n / 2) as f64) * h)).collect();
    let area = h * h;
    let magnitudes: Vec<Vec<f64>> = positions
        .par_iter()
        .map(|z| {
            let mut patch = vec![Complex64::new(0.0, 0.0); n * n];
            // position of patch sample (a, b) on the symbol grid
            let mx0 = (z.x - ps.x0()) / ps.dx();
            let kw0 = (z.omega - ps.w0()) / ps.dw();
            for a in 0..n {
                let mi = mx0.round() as i64 + (a as i64 - (n / 2) as i64) * sx as i64;
                if mi < 0 || mi >= ps.nx() as i64 {
                    continue;
                }
                for b in 0..n {
                    let ki = kw0.round() as i64 + (b as i64 - (n / 2) as i64) * sw as i64;
                    if ki < 0 || ki >= ps.nw() as i64 {
                        continue;
                    }
                    patch[a * n + b] = f.get(mi as usize, ki as usize) * (taper[a] * taper[b] * area);
                }
            }
            fft::forward_2d(&mut patch, n, n);
            let mut row = Vec::with_capacity(kept.len() * kept.len());
            for (ja, _) in &kept {
                for (jb, _) in &kept {
                    row.push(patch[ja * n + jb].norm());
                }
            }
            row
        })
        .collect();
    Ok(SymbolStft { positions, freqs, magnitudes })
}

/// `‖F‖_{M^{∞,1}_{0,s}}` (parameters `(∞,1,0,s)`) or `‖F‖_{M^1_{s,t}}`
/// (parameters `(1,1,s,t)`) of a phase-space symbol, on the coarse 4-D
/// sampling.
pub fn mixed_norm_symbol(f: &PhaseSpaceFunction, params: &MixedNormParams) -> Result<f64> {
    mixed_norm_symbol_with(f, params, &SymbolNormGrid::coarse())
}

pub fn mixed_norm_symbol_with(f: &PhaseSpaceFunction, params: &MixedNormParams, res: &SymbolNormGrid) -> Result<f64> {
    let sup_then_integrate = match (params.p, params.q) {
        (Exponent::Infinity, Exponent::One) if params.s == 0.0 => true,
        (Exponent::One, Exponent::One) => false,
        (p, q) => return Err(Error::UnsupportedNorm { p: p.as_str().into(), q: q.as_str().into() }),
    };
    let st = symbol_stft(f, res)?;
    let dz = res.position_step * res.position_step;
    let dzeta = res.freq_step * res.freq_step;
    let zeta_weight: Vec<f64> = st.freqs.iter().map(|z| (1.0 + z.norm()).powf(params.t)).collect();
    if sup_then_integrate {
        let mut sup = vec![0.0f64; st.freqs.len()];
        for row in &st.magnitudes {
            for (s, v) in sup.iter_mut().zip(row) {
                *s = s.max(*v);
            }
        }
        Ok(sup.iter().zip(&zeta_weight).map(|(s, w)| s * w).sum::<f64>() * dzeta)
    } else {
        let total: f64 = st
            .positions
            .iter()
            .zip(&st.magnitudes)
            .map(|(z, row)| {
                let wz = (1.0 + z.norm()).powf(params.s);
                wz * row.iter().zip(&zeta_weight).map(|(v, w)| v * w).sum::<f64>()
            })
            .sum();
        Ok(total * dz * dzeta)
    }
}

fn check_dilation(a: f64) -> Result<()> {
    if !(MIN_DILATION..=MAX_DILATION).contains(&a) {
        return Err(Error::Parameter(format!(
            "dilation factor {a} outside [{MIN_DILATION}, {MAX_DILATION}]"
        )));
    }
    Ok(())
}

/// `D_a f(t) = f(a t)` by band-limited resampling of the samples.
pub fn dilate_signal(f: &SampledSignal, a: f64) -> Result<SampledSignal> {
    check_dilation(a)?;
    if a == 1.0 {
        return Ok(f.clone());
    }
    let grid = f.grid();
    SampledSignal::new(*grid, dilate_samples(f.samples(), grid.t0(), grid.dt(), a))
}

/// `D_a g` for a window, re-evaluated exactly when the window is analytic.
pub fn dilate_window(w: &Window, a: f64) -> Result<Window> {
    check_dilation(a)?;
    Ok(w.dilated(a))
}

/// `D_a F(z) = F(a z)` on both phase-space axes, by band-limited resampling
/// along each axis in turn.
pub fn dilate_symbol(f: &PhaseSpaceFunction, a: f64) -> Result<PhaseSpaceFunction> {
    check_dilation(a)?;
    if a == 1.0 {
        return Ok(f.clone());
    }
    let ps = *f.psgrid();
    let (nx, nw) = (ps.nx(), ps.nw());
    let mut rows: Vec<Complex64> = f
        .values()
        .par_chunks(nw)
        .flat_map_iter(|row| dilate_samples(row, ps.w0(), ps.dw(), a))
        .collect();
    let cols: Vec<Vec<Complex64>> = (0..nw)
        .into_par_iter()
        .map(|k| {
            let col: Vec<Complex64> = (0..nx).map(|m| rows[m * nw + k]).collect();
            dilate_samples(&col, ps.x0(), ps.dx(), a)
        })
        .collect();
    for (k, col) in cols.iter().enumerate() {
        for (m, v) in col.iter().enumerate() {
            rows[m * nw + k] = *v;
        }
    }
    PhaseSpaceFunction::new(ps, rows)
}

/// Dilated norm at one factor against the predicted growth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationRow {
    pub a: f64,
    pub norm: f64,
    /// Predicted growth factor times the undilated norm.
    pub bound: f64,
    pub ratio: f64,
}

/// Smallest constant `C` with `‖D_a f‖ ≤ C · bound(a)` over the factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationFit {
    pub constant: f64,
    pub rows: Vec<DilationRow>,
}

fn fit_dilation(factors: &[f64], base: f64, growth: impl Fn(f64) -> f64, norm_at: impl Fn(f64) -> Result<f64> + Sync) -> Result<DilationFit> {
    if factors.is_empty() {
        return Err(Error::Parameter("empty list of dilation factors".into()));
    }
    let rows: Vec<DilationRow> = factors
        .iter()
        .map(|&a| {
            let norm = norm_at(a)?;
            let bound = growth(a) * base;
            let ratio = if bound > 0.0 { norm / bound } else { 0.0 };
            Ok(DilationRow { a, norm, bound, ratio })
        })
        .collect::<Result<_>>()?;
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(DilationFit { constant, rows })
}

/// Fitted constant of `‖D_a f‖_{M^{∞,1}_{0,s}} ≤ C max{1,a} max{1,a^s} ‖f‖_{M^{∞,1}_{0,s}}`
/// for a signal on the line.
pub fn dilation_fit_signal(f: &SampledSignal, s: f64, factors: &[f64], psgrid: &PhaseSpaceGrid) -> Result<DilationFit> {
    let params = MixedNormParams::sjostrand(s);
    let base = mixed_norm_signal(f, &params, psgrid)?;
    fit_dilation(
        factors,
        base,
        |a| a.max(1.0) * a.powf(s).max(1.0),
        |a| mixed_norm_signal(&dilate_signal(f, a)?, &params, psgrid),
    )
}

/// Fitted constant of `‖D_a F‖_{M^1_{0,s}} ≤ C max{1,a^{-2}} max{1,a^s} ‖F‖_{M^1_{0,s}}`
/// for a symbol on the plane.
pub fn dilation_fit_symbol(f: &PhaseSpaceFunction, s: f64, factors: &[f64], res: &SymbolNormGrid) -> Result<DilationFit> {
    let params = MixedNormParams::new(Exponent::One, Exponent::One, 0.0, s)?;
    let base = mixed_norm_symbol_with(f, &params, res)?;
    fit_dilation(
        factors,
        base,
        |a| a.powi(-2).max(1.0) * a.powf(s).max(1.0),
        |a| mixed_norm_symbol_with(&dilate_symbol(f, a)?, &params, res),
    )
}

/// Region kept by the truncation approximant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationRegion {
    /// `ℝ × [-R, R]`: all positions, frequencies up to `R`.
    FrequencyBand,
    /// The disc of radius `R` in phase space.
    PhaseSpaceBall,
}

impl TruncationRegion {
    pub fn as_str(&self) -> &'static str {
        match self {
            TruncationRegion::FrequencyBand => "frequency_band",
            TruncationRegion::PhaseSpaceBall => "phase_space_ball",
        }
    }

    fn contains(&self, z: TFPoint, radius: f64) -> bool {
        match self {
            TruncationRegion::FrequencyBand => z.omega.abs() <= radius,
            TruncationRegion::PhaseSpaceBall => z.norm() <= radius,
        }
    }
}

/// Weights `a ≤ b ≤ c`, accuracy `ε ∈ (0, 1]` and region of a truncation
/// approximant; the truncation radius is `R = 1/ε − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub epsilon: f64,
    pub region: TruncationRegion,
}

impl ApproxParams {
    pub fn new(a: f64, b: f64, c: f64, epsilon: f64, region: TruncationRegion) -> Result<Self> {
        if !(a <= b && b <= c && a.is_finite() && c.is_finite()) {
            return Err(Error::Parameter(format!("weights must satisfy a ≤ b ≤ c, got ({a}, {b}, {c})")));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Parameter(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        Ok(Self { a, b, c, epsilon, region })
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.epsilon - 1.0
    }
}

/// `h = istft(χ_Ω · V_φ g, φ)`: the part of `g` whose Gaussian STFT lies in
/// the truncation region.
pub fn truncate_approx(g: &SampledSignal, params: &ApproxParams, psgrid: &PhaseSpaceGrid) -> Result<SampledSignal> {
    let phi = make_window(&WindowKind::Analytic(WindowSpec::Gaussian), *g.grid())?;
    let v = stft(g, &phi, psgrid)?;
    check_coverage(&v, &MixedNormParams::l2())?;
    truncate_coefficients(&v, &phi, params)
}

fn truncate_coefficients(v: &PhaseSpaceFunction, phi: &SampledSignal, params: &ApproxParams) -> Result<SampledSignal> {
    let r = params.radius();
    let region = params.region;
    let kept = v.masked(|z| if region.contains(z, r) { 1.0 } else { 0.0 });
    Ok(istft(&kept, phi)?.signal)
}

/// One row of a tradeoff table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub epsilon: f64,
    pub region: TruncationRegion,
    /// `‖g − h‖` at weight `a`.
    pub err_norm_a: f64,
    /// `‖h‖` at weight `c`.
    pub h_norm_c: f64,
}

/// Log-log slopes of the error and growth columns for one region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffSlopes {
    pub region: TruncationRegion,
    pub slope_err: f64,
    pub slope_growth: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffTable {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rows: Vec<TradeoffRow>,
    pub slopes: Vec<TradeoffSlopes>,
}

impl TradeoffTable {
    pub fn slopes_for(&self, region: TruncationRegion) -> Option<TradeoffSlopes> {
        self.slopes.iter().copied().find(|s| s.region == region)
    }
}

/// Norms used for a region: `M^{∞,1}_{0,w}` for the frequency band and
/// `M^1_w` for the phase-space ball.
pub fn region_norm(region: TruncationRegion, weight: f64) -> MixedNormParams {
    match region {
        TruncationRegion::FrequencyBand => MixedNormParams::sjostrand(weight),
        TruncationRegion::PhaseSpaceBall => MixedNormParams::feichtinger(weight),
    }
}

/// Least-squares slope of `log y` against `log x`; pairs with a
/// nonpositive entry are skipped.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Error and growth of the truncation approximants of `g` over `eps_list`
/// for the given regions, with fitted slopes.
pub fn tradeoff_table(
    g: &SampledSignal,
    (a, b, c): (f64, f64, f64),
    eps_list: &[f64],
    regions: &[TruncationRegion],
    psgrid: &PhaseSpaceGrid,
) -> Result<TradeoffTable> {
    if eps_list.is_empty() {
        return Err(Error::Parameter("empty epsilon list".into()));
    }
    let phi = make_window(&WindowKind::Analytic(WindowSpec::Gaussian), *g.grid())?;
    let v = stft(g, &phi, psgrid)?;
    check_coverage(&v, &MixedNormParams::l2())?;
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for &region in regions {
        let (norm_a, norm_c) = (region_norm(region, a), region_norm(region, c));
        let region_rows: Vec<TradeoffRow> = eps_list
            .par_iter()
            .map(|&eps| {
                let params = ApproxParams::new(a, b, c, eps, region)?;
                let h = truncate_coefficients(&v, &phi, &params)?;
                let err = mixed_norm_of(&stft(&g.sub(&h), &phi, psgrid)?, &norm_a);
                let growth = mixed_norm_of(&stft(&h, &phi, psgrid)?, &norm_c);
                Ok(TradeoffRow { epsilon: eps, region, err_norm_a: err, h_norm_c: growth })
            })
            .collect::<Result<_>>()?;
        let eps: Vec<f64> = region_rows.iter().map(|r| r.epsilon).collect();
        let errs: Vec<f64> = region_rows.iter().map(|r| r.err_norm_a).collect();
        let growth: Vec<f64> = region_rows.iter().map(|r| r.h_norm_c).collect();
        slopes.push(TradeoffSlopes {
            region,
            slope_err: loglog_slope(&eps, &errs).unwrap_or(f64::NAN),
            slope_growth: loglog_slope(&eps, &growth).unwrap_or(f64::NAN),
        });
        rows.extend(region_rows);
    }
    Ok(TradeoffTable { a, b, c, rows, slopes })
}

/// Profile of a designed STFT envelope along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decay {
    /// Only the node at the origin.
    Localized,
    /// `(1+|u|)^{-exponent}`.
    PowerLaw { exponent: f64 },
}

/// A signal whose Gaussian STFT follows a prescribed envelope: a sum of
/// Gaussian atoms on the lattice `node_step·ℤ²` with amplitudes given by the
/// envelope, seeded random unimodular phases, and a smooth cutoff starting
/// at `taper_start` and reaching zero `taper_width` later.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeDesign {
    pub decay_x: Decay,
    pub decay_omega: Decay,
    pub node_step: f64,
    pub taper_start: f64,
    pub taper_width: f64,
    pub seed: u64,
}

impl EnvelopeDesign {
    fn taper(&self, u: f64) -> f64 {
        let u = u.abs();
        if u <= self.taper_start {
            1.0
        } else if u >= self.taper_start + self.taper_width {
            0.0
        } else {
            let r = (u - self.taper_start) / self.taper_width;
            (0.5 * PI * r).cos().powi(2)
        }
    }

    fn nodes(&self, decay: Decay) -> Vec<(f64, f64)> {
        match decay {
            Decay::Localized => vec![(0.0, 1.0)],
            Decay::PowerLaw { exponent } => {
                let reach = ((self.taper_start + self.taper_width) / self.node_step).floor() as i64;
                (-reach..=reach)
                    .map(|i| {
                        let u = i as f64 * self.node_step;
                        (u, (1.0 + u.abs()).powf(-exponent) * self.taper(u))
                    })
                    .filter(|(_, w)| *w > 0.0)
                    .collect()
            }
        }
    }

    /// Samples on `grid`, normalized to unit `L²` norm.
    pub fn synthesize(&self, grid: GridSpec) -> Result<SampledSignal> {
        if !(self.node_step > 0.0 && self.taper_start >= 0.0 && self.taper_width > 0.0) {
            return Err(Error::Parameter(format!("invalid envelope design {self:?}")));
        }
        let xs = self.nodes(self.decay_x);
        let ws = self.nodes(self.decay_omega);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let coeffs: Vec<Vec<Complex64>> = xs
            .iter()
            .map(|(_, ax)| {
                ws.iter().map(|(_, aw)| Complex64::from_polar(ax * aw, 2.0 * PI * rng.gen::<f64>())).collect()
            })
            .collect();
        let times: Vec<f64> = grid.times().collect();
        let samples: Vec<Complex64> = times
            .par_iter()
            .map(|&t| {
                let mut acc = Complex64::new(0.0, 0.0);
                for ((x, _), row) in xs.iter().zip(&coeffs) {
                    let env = gaussian(t - x);
                    if env < 1e-300 {
                        continue;
                    }
                    let mut inner = Complex64::new(0.0, 0.0);
                    for ((w, _), c) in ws.iter().zip(row) {
                        inner += c * Complex64::from_polar(1.0, 2.0 * PI * w * t);
                    }
                    acc += inner * env;
                }
                acc
            })
            .collect();
        SampledSignal::new(grid, samples)?.normalized()
    }
}
