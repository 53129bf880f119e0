//! Time-frequency shifts, the short-time Fourier transform, its synthesis
//! operator and the cross-Wigner distribution on the periodic sampled model.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{GridSpec, PhaseSpaceGrid, TFPoint};
use crate::signal::{PhaseSpaceFunction, SampledSignal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Steps closer than this (in units of dt or of a frequency bin) to an
/// integer are treated as grid-aligned.
const ALIGN_TOL: f64 = 1e-9;

fn integer_steps(value: f64, step: f64) -> Option<i64> {
    let r = value / step;
    let n = r.round();
    ((r - n).abs() <= ALIGN_TOL).then_some(n as i64)
}

/// Circular translation `T_x f`. Grid-aligned shifts move samples; other
/// shifts multiply the spectrum by the phase ramp `e^{-2πiνx}`.
pub fn translate(f: &SampledSignal, x: f64) -> SampledSignal {
    let grid = *f.grid();
    let l = grid.len();
    if let Some(k) = integer_steps(x, grid.dt()) {
        let k = k.rem_euclid(l as i64) as usize;
        let src = f.samples();
        let out = (0..l).map(|n| src[(n + l - k) % l]).collect();
        return SampledSignal::from_raw(grid, out);
    }
    let mut spec = f.samples().to_vec();
    fft::forward(&mut spec);
    apply_phase_ramp(&mut spec, &grid, x);
    fft::inverse(&mut spec);
    let inv = 1.0 / l as f64;
    spec.iter_mut().for_each(|v| *v *= inv);
    SampledSignal::from_raw(grid, spec)
}

fn apply_phase_ramp(spec: &mut [Complex64], grid: &GridSpec, x: f64) {
    let l = spec.len();
    let df = grid.freq_step();
    for (j, v) in spec.iter_mut().enumerate() {
        let nu = fft::signed_index(j, l) as f64 * df;
        *v *= Complex64::from_polar(1.0, -2.0 * PI * nu * x);
    }
}

/// Pointwise modulation `M_ω f(t) = e^{2πiωt} f(t)`.
pub fn modulate(f: &SampledSignal, omega: f64) -> SampledSignal {
    let grid = *f.grid();
    let out = f
        .samples()
        .iter()
        .enumerate()
        .map(|(n, v)| v * Complex64::from_polar(1.0, 2.0 * PI * omega * grid.time(n)))
        .collect();
    SampledSignal::from_raw(grid, out)
}

/// `π(z) f = M_ω T_x f`.
pub fn tf_shift(f: &SampledSignal, z: TFPoint) -> SampledSignal {
    let shifted = if z.x == 0.0 { f.clone() } else { translate(f, z.x) };
    if z.omega == 0.0 {
        shifted
    } else {
        modulate(&shifted, z.omega)
    }
}

/// `V_g f(z) = ⟨f, π(z) g⟩` at a single point by direct summation.
pub fn stft_at(f: &SampledSignal, g: &SampledSignal, z: TFPoint) -> Result<Complex64> {
    f.same_grid(g)?;
    Ok(f.inner(&tf_shift(g, z)))
}

/// Frequency nodes of `psgrid` as DFT bin offsets: `ω_k = (first + k·stride)/(L·dt)`.
fn frequency_bins(grid: &GridSpec, psgrid: &PhaseSpaceGrid) -> Result<(i64, i64)> {
    let df = grid.freq_step();
    let first = integer_steps(psgrid.w0(), df);
    let stride = integer_steps(psgrid.dw(), df);
    match (first, stride) {
        (Some(first), Some(stride)) if stride > 0 => {
            let span = stride * psgrid.nw() as i64;
            if span > grid.len() as i64 {
                return Err(Error::IncompatibleGrids(format!(
                    "frequency range of {} bins exceeds the {} available",
                    span,
                    grid.len()
                )));
            }
            Ok((first, stride))
        }
        _ => Err(Error::IncompatibleGrids(format!(
            "frequency nodes (ω0={}, dω={}) are not multiples of the bin spacing {}",
            psgrid.w0(),
            psgrid.dw(),
            df
        ))),
    }
}

/// Short-time Fourier transform `V_g f(x_m, ω_k) = ⟨f, π(x_m, ω_k) g⟩`.
///
/// Each position costs one translation of `g` and one FFT of the product
/// `f · conj(T_x g)`, whose bins give all frequencies at once.
pub fn stft(f: &SampledSignal, g: &SampledSignal, psgrid: &PhaseSpaceGrid) -> Result<PhaseSpaceFunction> {
    f.same_grid(g)?;
    let grid = *f.grid();
    let l = grid.len();
    let (first, stride) = frequency_bins(&grid, psgrid)?;
    let nw = psgrid.nw();
    // e^{-2πiω_k t0} folds the grid origin into the phase.
    let origin_phase: Vec<Complex64> = (0..nw)
        .map(|k| Complex64::from_polar(grid.dt(), -2.0 * PI * psgrid.omega(k) * grid.t0()))
        .collect();
    let mut values = Vec::with_capacity(psgrid.len());
    let mut buf = vec![ZERO; l];
    for m in 0..psgrid.nx() {
        let gx = translate(g, psgrid.x(m));
        for ((b, a), w) in buf.iter_mut().zip(f.samples()).zip(gx.samples()) {
            *b = a * w.conj();
        }
        fft::forward(&mut buf);
        for (k, ph) in origin_phase.iter().enumerate() {
            let bin = (first + stride * k as i64).rem_euclid(l as i64) as usize;
            values.push(buf[bin] * ph);
        }
    }
    Ok(PhaseSpaceFunction::from_raw(*psgrid, values))
}

/// Riemann-sum synthesis `Σ F(z) π(z) g · dx dω` without consistency checks.
pub fn synthesize(coeffs: &PhaseSpaceFunction, g: &SampledSignal) -> Result<SampledSignal> {
    let grid = *g.grid();
    let psgrid = *coeffs.psgrid();
    let l = grid.len();
    let (first, stride) = frequency_bins(&grid, &psgrid)?;
    let nw = psgrid.nw();
    let weight = psgrid.cell_area();
    let origin_phase: Vec<Complex64> = (0..nw)
        .map(|k| Complex64::from_polar(weight, 2.0 * PI * psgrid.omega(k) * grid.t0()))
        .collect();
    let mut out = vec![ZERO; l];
    let mut buf = vec![ZERO; l];
    for m in 0..psgrid.nx() {
        let row = &coeffs.values()[m * nw..(m + 1) * nw];
        if row.iter().all(|v| *v == ZERO) {
            continue;
        }
        buf.iter_mut().for_each(|v| *v = ZERO);
        for (k, (c, ph)) in row.iter().zip(&origin_phase).enumerate() {
            let bin = (first + stride * k as i64).rem_euclid(l as i64) as usize;
            buf[bin] += c * ph;
        }
        // buf now holds Σ_k F e^{2πiω_k t0} δ_bin; the inverse FFT yields
        // Σ_k F e^{2πiω_k t_n} at every sample.
        fft::inverse(&mut buf);
        let gx = translate(g, psgrid.x(m));
        for ((o, u), w) in out.iter_mut().zip(&buf).zip(gx.samples()) {
            *o += u * w;
        }
    }
    Ok(SampledSignal::from_raw(grid, out))
}

/// Result of [`istft`]: the synthesized signal and the relative residual
/// `‖V_g(istft F) − F‖ / ‖F‖`, which is small exactly when `F` is (close to)
/// an STFT and the phase-space grid resolves the window.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub signal: SampledSignal,
    pub residual: f64,
}

/// Largest position or frequency step accepted by [`istft`]. At a quarter of
/// the Gaussian's unit scale the Riemann sum of the resolution of the
/// identity is accurate to about `1e-10`.
pub const MAX_SYNTHESIS_STEP: f64 = 0.25;

/// Inverse STFT by the continuous resolution of the identity.
///
/// Grids coarser than [`MAX_SYNTHESIS_STEP`] on either axis are rejected
/// rather than silently producing aliased output.
pub fn istft(coeffs: &PhaseSpaceFunction, g: &SampledSignal) -> Result<Synthesis> {
    let psgrid = coeffs.psgrid();
    for (name, step) in [("position", psgrid.dx()), ("frequency", psgrid.dw())] {
        if step > MAX_SYNTHESIS_STEP * (1.0 + 1e-12) {
            return Err(Error::IncompatibleGrids(format!(
                "{name} step {step} is coarser than {MAX_SYNTHESIS_STEP}"
            )));
        }
    }
    let signal = synthesize(coeffs, g)?;
    let norm = coeffs.l2_norm();
    let residual = if norm == 0.0 {
        0.0
    } else {
        let again = stft(&signal, g, psgrid)?;
        again.sub(coeffs)?.l2_norm() / norm
    };
    Ok(Synthesis { signal, residual })
}

/// Band-limited upsampling by two: samples of the trigonometric interpolant
/// at spacing `dt/2`. The Nyquist bin is split between `±L/2`.
pub fn upsample2(f: &SampledSignal) -> Vec<Complex64> {
    let l = f.grid().len();
    let mut spec = f.samples().to_vec();
    fft::forward(&mut spec);
    let mut wide = vec![ZERO; 2 * l];
    let half = l / 2;
    if l.is_multiple_of(2) {
        for j in 0..half {
            wide[j] = spec[j];
        }
        for j in half + 1..l {
            wide[j + l] = spec[j];
        }
        wide[half] = spec[half] * 0.5;
        wide[half + l] = spec[half] * 0.5;
    } else {
        for j in 0..=half {
            wide[j] = spec[j];
        }
        for j in half + 1..l {
            wide[j + l] = spec[j];
        }
    }
    fft::inverse(&mut wide);
    let inv = 1.0 / l as f64;
    wide.iter_mut().for_each(|v| *v *= inv);
    wide
}

/// Cross-Wigner distribution `W(f,g)(x,ω) = ∫ f(x+t/2) conj(g(x−t/2)) e^{−2πiωt} dt`.
///
/// Positions must lie on the half-sample lattice `t0 + p·dt/2` and
/// frequencies on the DFT bins. Both signals are upsampled by two so that
/// `f(x ± t/2)` is available at every lag `t = k·dt`; lags are restricted to
/// `|t| < L·dt/2`, so each pair of periodic points contributes through its
/// shorter separation only.
pub fn wigner(f: &SampledSignal, g: &SampledSignal, psgrid: &PhaseSpaceGrid) -> Result<PhaseSpaceFunction> {
    f.same_grid(g)?;
    let grid = *f.grid();
    let l = grid.len();
    if !l.is_multiple_of(2) {
        return Err(Error::InvalidGrid("the Wigner distribution needs an even number of samples".into()));
    }
    let (first, stride) = frequency_bins(&grid, psgrid)?;
    let half_dt = grid.dt() / 2.0;
    let mut positions = Vec::with_capacity(psgrid.nx());
    for m in 0..psgrid.nx() {
        let p = integer_steps(psgrid.x(m) - grid.t0(), half_dt).ok_or_else(|| {
            Error::IncompatibleGrids(format!("position {} is not on the half-sample lattice", psgrid.x(m)))
        })?;
        positions.push(p.rem_euclid(2 * l as i64) as usize);
    }
    let f2 = upsample2(f);
    let g2 = upsample2(g);
    let l2 = 2 * l;
    let nw = psgrid.nw();
    let mut values = Vec::with_capacity(psgrid.len());
    let mut buf = vec![ZERO; l];
    for &p in &positions {
        for k in 0..l {
            // lag index k ↦ signed lag in [−L/2, L/2)
            let lag = fft::signed_index(k, l);
            let plus = (p as i64 + lag).rem_euclid(l2 as i64) as usize;
            let minus = (p as i64 - lag).rem_euclid(l2 as i64) as usize;
            buf[k] = f2[plus] * g2[minus].conj();
        }
        fft::forward(&mut buf);
        for k in 0..nw {
            let bin = (first + stride * k as i64).rem_euclid(l as i64) as usize;
            values.push(buf[bin] * grid.dt());
        }
    }
    Ok(PhaseSpaceFunction::from_raw(*psgrid, values))
}
