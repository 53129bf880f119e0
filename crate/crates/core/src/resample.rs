//! Evaluation of trigonometric interpolants at dilated node positions by the
//! chirp-z (Bluestein) algorithm.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::fft;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Given samples `v_m` of a periodic function at `y_m = y0 + m·h`
/// (`m = 0..n`), return the trigonometric interpolant evaluated at the
/// dilated positions `a·y_m`.
///
/// Positions `a·y_m` outside the sampled interval `[y0, y0 + n·h)` are set to
/// zero instead of being read from a periodic image, which is the right
/// convention for functions localized inside the box.
pub fn dilate_samples(values: &[Complex64], y0: f64, h: f64, a: f64) -> Vec<Complex64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut spec = values.to_vec();
    fft::forward(&mut spec);
    let period = n as f64 * h;
    // v(y) = (1/n) Σ_k V_k e^{2πi k (y − y0)/(n h)}; at y = a·y_m the phase is
    // k·(a m/n + y0 (a−1)/(n h)).
    let offset = y0 * (a - 1.0) / period;
    let half = n / 2;
    // Coefficients indexed by k' = k + n/2, k ∈ [−n/2, n/2 + n%2).
    let kmin = -(half as i64);
    let mut w = vec![ZERO; n];
    for (j, v) in spec.iter().enumerate() {
        let k = fft::signed_index(j, n);
        let mut c = *v * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * offset);
        if n.is_multiple_of(2) && k == kmin {
            // split the Nyquist bin between ±n/2
            c *= 0.5;
        }
        w[(k - kmin) as usize] = c;
    }
    let mut out = chirp_sum(&w, kmin, a, n);
    if n.is_multiple_of(2) {
        // the other half of the Nyquist bin sits at k = +n/2
        let c = spec[half] * Complex64::from_polar(0.5, 2.0 * PI * half as f64 * offset);
        for (m, o) in out.iter_mut().enumerate() {
            *o += c * Complex64::from_polar(1.0, 2.0 * PI * a * half as f64 * m as f64 / n as f64);
        }
    }
    let inv = 1.0 / n as f64;
    let upper = y0 + period;
    for (m, o) in out.iter_mut().enumerate() {
        let y = a * (y0 + m as f64 * h);
        if y < y0 - 1e-12 * period || y >= upper {
            *o = ZERO;
        } else {
            *o *= inv;
        }
    }
    out
}

/// `u_m = Σ_{k'} w[k'] e^{2πi a (k' + kmin) m / n}` for `m = 0..n`, via
/// `k m = (k² + m² − (m − k)²)/2`.
fn chirp_sum(w: &[Complex64], kmin: i64, a: f64, n: usize) -> Vec<Complex64> {
    let nk = w.len();
    let size = (nk + n).next_power_of_two();
    let chirp = |x: f64| Complex64::from_polar(1.0, PI * a * x * x / n as f64);
    let mut fa = vec![ZERO; size];
    for (kp, v) in w.iter().enumerate() {
        let k = kp as i64 + kmin;
        fa[kp] = v * chirp(k as f64);
    }
    // r = m − k' ranges over (−nk, n); m − k = r − kmin.
    let mut fb = vec![ZERO; size];
    for r in -(nk as i64) + 1..n as i64 {
        let idx = r.rem_euclid(size as i64) as usize;
        fb[idx] = chirp((r - kmin) as f64).conj();
    }
    fft::forward(&mut fa);
    fft::forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    fft::inverse(&mut fa);
    let inv = 1.0 / size as f64;
    (0..n).map(|m| fa[m] * inv * chirp(m as f64)).collect()
}
