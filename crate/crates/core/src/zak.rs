//! Frame bounds of Gabor systems on separable rational lattices from the
//! Zak-domain fiber matrices. Independent of every sampled-signal route.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gabor::{BoundsMethod, FrameBounds};
use crate::window::Window;

/// Largest denominator accepted when snapping a density to a rational.
pub const MAX_DENOMINATOR: u64 = 64;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Closest fraction `p/q` to `x > 0` with `q ≤ max_den`, smallest `q` on ties.
pub fn best_rational(x: f64, max_den: u64) -> (u64, u64) {
    let mut best = (x.round().max(1.0) as u64, 1u64);
    let mut err = (x - best.0 as f64).abs();
    for q in 2..=max_den {
        let p = (x * q as f64).round().max(1.0) as u64;
        let e = (x - p as f64 / q as f64).abs();
        if e < err - 1e-15 {
            err = e;
            best = (p, q);
        }
    }
    let d = gcd(best.0, best.1);
    (best.0 / d, best.1 / d)
}

/// The fiber matrix `Φ(t,θ)_{r,s} = Σ_n g(t − (r + n p)/b − a s) e^{2πinθ}`,
/// `0 ≤ r < p`, `0 ≤ s < q`, for the lattice `aℤ × bℤ` with `ab = p/q`.
fn fiber(window: &Window, a: f64, b: f64, p: usize, q: usize, t: f64, theta: f64) -> DMatrix<Complex64> {
    let radius = window.support_radius();
    let pf = p as f64;
    DMatrix::from_fn(p, q, |r, s| {
        let shift = t - r as f64 / b - a * s as f64;
        // arguments shift − n p/b within the window support
        let n_lo = ((shift - radius) * b / pf).floor() as i64;
        let n_hi = ((shift + radius) * b / pf).ceil() as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in n_lo..=n_hi {
            let arg = shift - n as f64 * pf / b;
            if arg.abs() <= radius {
                acc += window.eval(arg) * Complex64::from_polar(1.0, 2.0 * PI * n as f64 * theta);
            }
        }
        acc
    })
}

/// Extreme eigenvalues of the frame operator restricted to one fiber.
fn fiber_extremes(window: &Window, a: f64, b: f64, p: usize, q: usize, t: f64, theta: f64) -> (f64, f64) {
    let phi = fiber(window, a, b, p, q, t, theta);
    let scale = Complex64::new(1.0 / b, 0.0);
    if p <= q {
        let h = (&phi * phi.adjoint()) * scale;
        let eig = h.symmetric_eigenvalues();
        (eig.min(), eig.max())
    } else {
        // fewer columns than rows: the operator has a kernel
        let h = (phi.adjoint() * &phi) * scale;
        (0.0, h.symmetric_eigenvalues().max())
    }
}

/// Frame bounds of `G(g, aℤ × bℤ)` with `ab = p/q` (coprime), from the
/// fiber matrices on a `res × res` grid of `(t, θ) ∈ [0, 1/(qb)) × [0, 1)`,
/// followed by `refine` rounds of local grid refinement around the minimum
/// and maximum. Bounds are for the unit-norm window.
pub fn zak_bounds(window: &Window, a: f64, b: f64, p: u64, q: u64, res: usize, refine: usize) -> Result<FrameBounds> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Parameter(format!("lattice parameters must be positive, got a={a}, b={b}")));
    }
    if p == 0 || q == 0 || gcd(p, q) != 1 {
        return Err(Error::Parameter(format!("density {p}/{q} must be a reduced positive fraction")));
    }
    if ((a * b) - p as f64 / q as f64).abs() > 1e-12 * (a * b) {
        return Err(Error::Parameter(format!("a·b = {} does not equal {p}/{q}", a * b)));
    }
    if res < 2 {
        return Err(Error::Parameter("fiber resolution must be at least 2".into()));
    }
    let (p, q) = (p as usize, q as usize);
    let period_t = 1.0 / (q as f64 * b);
    let eval = |u: f64, v: f64| fiber_extremes(window, a, b, p, q, u.rem_euclid(1.0) * period_t, v.rem_euclid(1.0));

    let mut lower = (f64::INFINITY, 0.0, 0.0);
    let mut upper = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..res {
        for j in 0..res {
            let (u, v) = (i as f64 / res as f64, j as f64 / res as f64);
            let (lo, hi) = eval(u, v);
            if lo < lower.0 {
                lower = (lo, u, v);
            }
            if hi > upper.0 {
                upper = (hi, u, v);
            }
        }
    }
    let mut step = 1.0 / res as f64;
    for _ in 0..refine {
        let (mut new_lower, mut new_upper) = (lower, upper);
        let local = 4usize;
        for i in 0..=2 * local {
            for j in 0..=2 * local {
                let du = (i as f64 - local as f64) * step / local as f64;
                let dv = (j as f64 - local as f64) * step / local as f64;
                let (lo, _) = eval(lower.1 + du, lower.2 + dv);
                if lo < new_lower.0 {
                    new_lower = (lo, lower.1 + du, lower.2 + dv);
                }
                let (_, hi) = eval(upper.1 + du, upper.2 + dv);
                if hi > new_upper.0 {
                    new_upper = (hi, upper.1 + du, upper.2 + dv);
                }
            }
        }
        lower = new_lower;
        upper = new_upper;
        step /= local as f64;
    }
    let norm2 = window.l2_norm().powi(2);
    let lo = (lower.0 / norm2).max(0.0);
    Ok(FrameBounds {
        lower: lo,
        upper: (upper.0 / norm2).max(lo),
        method: BoundsMethod::Zak,
        samples: res,
        dt: None,
        rel: (1.0 / a).ceil() * (1.0 / b).ceil(),
    })
}

/// Frame bounds of the square lattice `αℤ²` with rational `α = num/den`.
pub fn zak_lattice_bounds(window: &Window, num: u64, den: u64, res: usize) -> Result<FrameBounds> {
    if num == 0 || den == 0 || gcd(num, den) != 1 {
        return Err(Error::Parameter(format!("alpha {num}/{den} must be a reduced positive fraction")));
    }
    let alpha = num as f64 / den as f64;
    zak_bounds(window, alpha, alpha, num * num, den * den, res, 2)
}

/// Frame bounds of the square lattice `α'ℤ²`, where `α'² = p/q` is the
/// closest fraction to `α²` with `q ≤` [`MAX_DENOMINATOR`]. Returns the
/// bounds and `α'`.
pub fn zak_square_lattice_bounds(window: &Window, alpha: f64, res: usize, refine: usize) -> Result<(FrameBounds, f64)> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let (p, q) = best_rational(alpha * alpha, MAX_DENOMINATOR);
    let used = (p as f64 / q as f64).sqrt();
    let bounds = zak_bounds(window, used, used, p, q, res, refine)?;
    Ok((bounds, used))
}
