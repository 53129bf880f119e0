//! Time-frequency node sets, Gabor frame operators (direct sum and Weyl
//! symbol), and frame bounds.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{GridSpec, PhaseSpaceGrid, TFPoint};
use crate::signal::{PhaseSpaceFunction, SampledSignal};
use crate::tfcore::{tf_shift, wigner};
use crate::weyl::{self, OperatorMatrix};
use crate::window::{gaussian, Window};

/// Windows with less than this fraction of their phase-space mass inside
/// the box are dropped from direct sums.
pub const MASS_THRESHOLD: f64 = 1e-14;

/// Centered phase-space torus `[-wx/2, wx/2) × [-ww/2, ww/2)` on which a node
/// set repeats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicBox {
    pub width_x: f64,
    pub width_omega: f64,
}

impl PeriodicBox {
    pub fn area(&self) -> f64 {
        self.width_x * self.width_omega
    }
}

/// A finite set of time-frequency nodes, optionally one period of a
/// periodic set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSet {
    points: Vec<TFPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    periodic_box: Option<PeriodicBox>,
}

impl AtomSet {
    pub fn new(points: Vec<TFPoint>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { points, periodic_box: None })
    }

    pub fn with_periodic_box(mut self, b: PeriodicBox) -> Result<Self> {
        if !(b.width_x > 0.0 && b.width_omega > 0.0 && b.width_x.is_finite() && b.width_omega.is_finite()) {
            return Err(Error::Parameter(format!("invalid periodic box {b:?}")));
        }
        let (hx, hw) = (b.width_x / 2.0, b.width_omega / 2.0);
        if let Some(p) = self.points.iter().find(|p| p.x < -hx || p.x >= hx || p.omega < -hw || p.omega >= hw) {
            return Err(Error::Parameter(format!("node ({}, {}) lies outside the periodic box", p.x, p.omega)));
        }
        self.periodic_box = Some(b);
        Ok(self)
    }

    /// `n × n` patch of `step·ℤ²`, indices `-n/2 .. n - n/2`.
    pub fn lattice_patch(step: f64, n: usize) -> Self {
        let start = -((n / 2) as i64);
        let mut points = Vec::with_capacity(n * n);
        for i in 0..n as i64 {
            for j in 0..n as i64 {
                points.push(TFPoint::new(step * (start + i) as f64, step * (start + j) as f64));
            }
        }
        Self { points, periodic_box: None }
    }

    /// One period of `step·ℤ²` on the torus of side `n·step`.
    pub fn periodic_lattice(step: f64, n: usize) -> Result<Self> {
        let w = step * n as f64;
        Self::lattice_patch(step, n).with_periodic_box(PeriodicBox { width_x: w, width_omega: w })
    }

    /// Lattice patch with every node moved by independent uniform offsets in
    /// `[0, amplitude)` per coordinate.
    pub fn jittered_grid(step: f64, n: usize, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = Self::lattice_patch(step, n);
        for p in &mut set.points {
            p.x += amplitude * rng.gen::<f64>();
            p.omega += amplitude * rng.gen::<f64>();
        }
        set
    }

    /// One period of a jittered lattice on the torus of side `n·step`;
    /// offsets are uniform in `[-amplitude, amplitude)` and nodes are wrapped
    /// back into the box.
    pub fn periodic_jittered(step: f64, n: usize, amplitude: f64, seed: u64) -> Result<Self> {
        let w = step * n as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = Self::lattice_patch(step, n);
        let wrap = |v: f64| (v + w / 2.0).rem_euclid(w) - w / 2.0;
        for p in &mut set.points {
            p.x = wrap(p.x + amplitude * (2.0 * rng.gen::<f64>() - 1.0));
            p.omega = wrap(p.omega + amplitude * (2.0 * rng.gen::<f64>() - 1.0));
        }
        set.with_periodic_box(PeriodicBox { width_x: w, width_omega: w })
    }

    /// Random points in `[-half_width, half_width)²` with pairwise distance at
    /// least `min_dist`, by dart throwing with a fixed attempt budget.
    pub fn random_separated(count: usize, min_dist: f64, half_width: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<TFPoint> = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while points.len() < count {
            attempts += 1;
            if attempts > 1000 * count.max(1) {
                return Err(Error::Parameter(format!(
                    "could only place {} of {count} points with separation {min_dist}",
                    points.len()
                )));
            }
            let p = TFPoint::new(
                half_width * (2.0 * rng.gen::<f64>() - 1.0),
                half_width * (2.0 * rng.gen::<f64>() - 1.0),
            );
            if points.iter().all(|q| (*q - p).norm() >= min_dist) {
                points.push(p);
            }
        }
        Ok(Self { points, periodic_box: None })
    }

    pub fn points(&self) -> &[TFPoint] {
        &self.points
    }

    pub fn periodic_box(&self) -> Option<PeriodicBox> {
        self.periodic_box
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Global time-frequency shift of every node.
    pub fn shifted(&self, z: TFPoint) -> Self {
        Self { points: self.points.iter().map(|p| *p + z).collect(), periodic_box: None }
    }

    pub fn union(&self, other: &AtomSet) -> Self {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Self { points, periodic_box: None }
    }
}

/// `αΛ`: every node (and the periodic box) scaled by `alpha`.
pub fn dilate_set(set: &AtomSet, alpha: f64) -> Result<AtomSet> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Parameter(format!("dilation factor must be positive, got {alpha}")));
    }
    Ok(AtomSet {
        points: set.points.iter().map(|p| p.scaled(alpha)).collect(),
        periodic_box: set.periodic_box.map(|b| PeriodicBox {
            width_x: alpha * b.width_x,
            width_omega: alpha * b.width_omega,
        }),
    })
}

/// `rel(Λ)`: the largest number of nodes in a half-open unit square
/// `u + [0,1)²`. A node `λ` is counted iff `λ − 1 < u ≤ λ` componentwise, so
/// the maximum is attained with both anchor coordinates at node coordinates.
pub fn rel_separation(set: &AtomSet) -> f64 {
    let pts = &set.points;
    if pts.is_empty() {
        return 0.0;
    }
    let mut best = 0usize;
    let mut column: Vec<f64> = Vec::with_capacity(pts.len());
    for anchor in pts {
        column.clear();
        column.extend(pts.iter().filter(|p| p.x >= anchor.x && p.x < anchor.x + 1.0).map(|p| p.omega));
        column.sort_by(f64::total_cmp);
        // sliding window: count of ω in [column[i], column[i] + 1)
        let mut hi = 0usize;
        for lo in 0..column.len() {
            if hi < lo {
                hi = lo;
            }
            while hi < column.len() && column[hi] < column[lo] + 1.0 {
                hi += 1;
            }
            best = best.max(hi - lo);
        }
    }
    best as f64
}

/// `‖Σ_λ δ_λ‖_{M^∞}` with the separable Gaussian window `φ ⊗ φ`. All terms
/// of the STFT are nonnegative at zero frequency, so the supremum is
/// `sup_z Σ_λ φ(λ_x − z_x) φ(λ_ω − z_ω)`, taken here over probe points every
/// `step` across the bounding box of the set.
pub fn comb_sup_norm(set: &AtomSet, step: f64) -> Result<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Parameter(format!("probe step must be positive, got {step}")));
    }
    let pts = &set.points;
    if pts.is_empty() {
        return Ok(0.0);
    }
    let lo = pts.iter().fold(TFPoint::new(f64::INFINITY, f64::INFINITY), |a, p| TFPoint::new(a.x.min(p.x), a.omega.min(p.omega)));
    let hi = pts
        .iter()
        .fold(TFPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |a, p| TFPoint::new(a.x.max(p.x), a.omega.max(p.omega)));
    let nx = ((hi.x - lo.x) / step).ceil() as usize + 1;
    let nw = ((hi.omega - lo.omega) / step).ceil() as usize + 1;
    let best = (0..nx)
        .into_par_iter()
        .map(|i| {
            let x = lo.x + i as f64 * step;
            let mut row_best: f64 = 0.0;
            for j in 0..nw {
                let w = lo.omega + j as f64 * step;
                let sum: f64 = pts.iter().map(|p| gaussian(p.x - x) * gaussian(p.omega - w)).sum();
                row_best = row_best.max(sum);
            }
            row_best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Fraction of the window energy of the sampled (centered) window `g` that
/// stays inside the time box and the frequency band after moving it to `z`.
fn mass_fractions(g: &SampledSignal) -> impl Fn(TFPoint) -> f64 {
    let grid = *g.grid();
    let l = grid.len();
    let time_energy: Vec<(f64, f64)> = grid.times().zip(g.samples()).map(|(t, v)| (t, v.norm_sqr())).collect();
    let mut spec = g.samples().to_vec();
    fft::forward(&mut spec);
    let freq_energy: Vec<(f64, f64)> =
        spec.iter().enumerate().map(|(j, v)| (fft::signed_index(j, l) as f64 * grid.freq_step(), v.norm_sqr())).collect();
    let total_t: f64 = time_energy.iter().map(|e| e.1).sum();
    let total_f: f64 = freq_energy.iter().map(|e| e.1).sum();
    let (t_lo, t_hi) = (grid.t0(), grid.t0() + grid.period());
    let band = 0.5 / grid.dt();
    move |z: TFPoint| {
        if total_t == 0.0 {
            return 0.0;
        }
        let inside_t: f64 =
            time_energy.iter().filter(|(t, _)| t + z.x >= t_lo && t + z.x < t_hi).map(|e| e.1).sum::<f64>() / total_t;
        let inside_f: f64 = freq_energy
            .iter()
            .filter(|(f, _)| f + z.omega >= -band && f + z.omega < band)
            .map(|e| e.1)
            .sum::<f64>()
            / total_f;
        inside_t * inside_f
    }
}

/// Nodes whose shifted windows keep at least [`MASS_THRESHOLD`] of their
/// mass inside the box.
pub fn effective_nodes(g: &SampledSignal, set: &AtomSet) -> Vec<TFPoint> {
    let frac = mass_fractions(g);
    set.points.iter().copied().filter(|z| frac(*z) >= MASS_THRESHOLD).collect()
}

fn atom_matrix(w: &SampledSignal, nodes: &[TFPoint]) -> DMatrix<Complex64> {
    let l = w.grid().len();
    let cols: Vec<Vec<Complex64>> = nodes.par_iter().map(|z| tf_shift(w, *z).into_samples()).collect();
    DMatrix::from_fn(l, nodes.len(), |i, j| cols[j][i])
}

/// `S_{g,h,Λ} = Σ_λ (π(λ)h)(π(λ)g)* · dt`, assembled as one matrix product.
pub fn frame_operator(g: &SampledSignal, h: &SampledSignal, set: &AtomSet) -> Result<OperatorMatrix> {
    g.same_grid(h)?;
    let nodes = effective_nodes(g, set);
    if nodes.is_empty() {
        return Err(Error::EmptyAtomSet);
    }
    let gm = atom_matrix(g, &nodes);
    let hm = if g == h { gm.clone() } else { atom_matrix(h, &nodes) };
    let dt = g.grid().dt();
    let s = (&hm * gm.adjoint()) * Complex64::new(dt, 0.0);
    OperatorMatrix::new(s, dt)
}

/// `G_δ = Σ_λ T_λ D_{1/√(1+δ)} W(h,g)` on the symbol grid of `g`'s grid;
/// `δ = 0` gives the Weyl symbol `σ_{g,h,Λ}` of the frame operator.
///
/// The cross-Wigner distribution is computed once, dilated if needed, and
/// translated to all nodes at once in the Fourier domain.
pub fn frame_symbol(g: &SampledSignal, h: &SampledSignal, set: &AtomSet, delta: f64) -> Result<PhaseSpaceFunction> {
    if !(delta.is_finite() && delta.abs() < 1.0) {
        return Err(Error::Parameter(format!("|delta| must be below 1, got {delta}")));
    }
    g.same_grid(h)?;
    let grid = *g.grid();
    let ps = PhaseSpaceGrid::symbol_grid(&grid)?;
    let nodes = effective_nodes(g, set);
    if nodes.is_empty() {
        return Err(Error::EmptyAtomSet);
    }
    let mut base = wigner(h, g, &ps)?;
    if delta != 0.0 {
        base = crate::modspace::dilate_symbol(&base, 1.0 / (1.0 + delta).sqrt())?;
    }
    translate_sum(&base, &nodes)
}

/// `Σ_λ F(z − λ)` for a symbol on a periodic phase-space grid, by the shift
/// theorem: one forward 2-D FFT, multiplication by `Σ_λ e^{−2πi(ξ·λ)}`, one
/// inverse FFT.
pub fn translate_sum(f: &PhaseSpaceFunction, nodes: &[TFPoint]) -> Result<PhaseSpaceFunction> {
    let ps = *f.psgrid();
    let (nx, nw) = (ps.nx(), ps.nw());
    let mut data = f.values().to_vec();
    fft::forward_2d(&mut data, nx, nw);
    let (px, pw) = (nx as f64 * ps.dx(), nw as f64 * ps.dw());
    // phases[m][λ] and phases[k][λ], combined as a matrix product
    let ax = DMatrix::from_fn(nx, nodes.len(), |m, j| {
        let xi = fft::signed_index(m, nx) as f64 / px;
        Complex64::from_polar(1.0, -2.0 * PI * xi * nodes[j].x)
    });
    let bw = DMatrix::from_fn(nodes.len(), nw, |j, k| {
        let eta = fft::signed_index(k, nw) as f64 / pw;
        Complex64::from_polar(1.0, -2.0 * PI * eta * nodes[j].omega)
    });
    let phase = ax * bw;
    for m in 0..nx {
        for k in 0..nw {
            data[m * nw + k] *= phase[(m, k)];
        }
    }
    fft::inverse_2d(&mut data, nx, nw);
    let inv = 1.0 / (nx * nw) as f64;
    data.iter_mut().for_each(|v| *v *= inv);
    PhaseSpaceFunction::new(ps, data)
}

/// How a frame bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMethod {
    Dense,
    Lanczos,
    Zak,
}

impl BoundsMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundsMethod::Dense => "dense",
            BoundsMethod::Lanczos => "lanczos",
            BoundsMethod::Zak => "zak",
        }
    }
}

/// Optimal frame bounds `A = σ₋(S)`, `B = σ₊(S)` with a resolution
/// descriptor: the signal length and spacing for matrix routes, or the
/// fiber sampling for the lattice oracle (`dt` absent).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub method: BoundsMethod,
    #[serde(rename = "L")]
    pub samples: usize,
    pub dt: Option<f64>,
    pub rel: f64,
}

fn bounds_from_operator(s: &OperatorMatrix, rel: f64) -> Result<FrameBounds> {
    let edges = weyl::spectral_edges(s)?;
    let method = if s.dim() <= weyl::DENSE_LIMIT { BoundsMethod::Dense } else { BoundsMethod::Lanczos };
    // S is positive semidefinite; tiny negative values are roundoff
    let lower = edges.sigma_minus.max(0.0);
    Ok(FrameBounds { lower, upper: edges.sigma_plus.max(lower), method, samples: s.dim(), dt: Some(s.dt()), rel })
}

/// Frame bounds of the (box-truncated) system `G(g, Λ)` on `g`'s grid.
pub fn frame_bounds(g: &SampledSignal, set: &AtomSet) -> Result<FrameBounds> {
    let s = frame_operator(g, g, set)?;
    bounds_from_operator(&s, rel_separation(set))
}

/// Signal grid on which the dilated torus `α·box` is sampled exactly: the
/// period is `α·width_x` and the frequency band `α·width_omega`, so the
/// number of samples is `α²·area`, which must be an integer.
pub fn torus_grid(pbox: PeriodicBox, alpha: f64) -> Result<GridSpec> {
    let k = alpha * alpha * pbox.area();
    let n = k.round();
    if (k - n).abs() > 1e-6 * k || n < 2.0 {
        return Err(Error::Parameter(format!(
            "alpha²·area = {k} must be an integer for an exact periodic model; snap alpha first"
        )));
    }
    let period = alpha * pbox.width_x;
    GridSpec::periodic(n as usize, period / n, -period / 2.0)
}

/// Nearest `α'` to `alpha` with `α'²·area` an integer.
pub fn snap_alpha_to_torus(pbox: PeriodicBox, alpha: f64) -> f64 {
    let area = pbox.area();
    let k = (alpha * alpha * area).round().max(2.0);
    (k / area).sqrt()
}

/// Samples of the periodized atom `Σ_j (π(z)g)(t + jP)` on `grid`.
pub fn periodized_atom(window: &Window, z: TFPoint, grid: &GridSpec) -> Vec<Complex64> {
    let p = grid.period();
    let r = window.support_radius();
    let reach = (r / p).ceil() as i64 + 1;
    grid.times()
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in -reach..=reach {
                let u = t + j as f64 * p;
                let d = u - z.x;
                if d.abs() <= r {
                    acc += Complex64::from_polar(1.0, 2.0 * PI * z.omega * u) * window.eval(d);
                }
            }
            acc
        })
        .collect()
}

/// Frame operator of the periodic system `G(g, α·Λ)` restricted to functions
/// that are periodic in time and frequency on the dilated torus. Every atom
/// is the exact periodization of the continuous atom, so nodes straddling
/// the seam contribute correctly.
pub fn periodized_frame_operator(window: &Window, set: &AtomSet, alpha: f64) -> Result<OperatorMatrix> {
    let pbox = set
        .periodic_box
        .ok_or_else(|| Error::Parameter("periodized frame operator needs a node set with a periodic box".into()))?;
    if set.is_empty() {
        return Err(Error::EmptyAtomSet);
    }
    let grid = torus_grid(pbox, alpha)?;
    let l = grid.len();
    let cols: Vec<Vec<Complex64>> =
        set.points.par_iter().map(|z| periodized_atom(window, z.scaled(alpha), &grid)).collect();
    let v = DMatrix::from_fn(l, cols.len(), |i, j| cols[j][i]);
    let dt = grid.dt();
    let s = (&v * v.adjoint()) * Complex64::new(dt, 0.0);
    OperatorMatrix::new(s, dt)
}

/// Frame bounds of the periodic system `G(g, α·Λ)`; `alpha` must satisfy
/// `α²·area ∈ ℤ` (see [`snap_alpha_to_torus`]). `rel` is that of one period
/// of the undilated nodes.
pub fn periodized_frame_bounds(window: &Window, set: &AtomSet, alpha: f64) -> Result<FrameBounds> {
    let s = periodized_frame_operator(window, set, alpha)?;
    let scale = window.l2_norm().powi(2);
    let mut b = bounds_from_operator(&s, rel_separation(set))?;
    // report bounds for the unit-norm window
    b.lower /= scale;
    b.upper /= scale;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_of_simple_sets() {
        assert_eq!(rel_separation(&AtomSet::lattice_patch(1.0, 6)), 1.0);
        assert_eq!(rel_separation(&AtomSet::lattice_patch(0.5, 8)), 4.0);
        assert_eq!(rel_separation(&AtomSet::new(vec![]).unwrap()), 0.0);
    }

    #[test]
    fn dilation_of_sets() {
        let z = AtomSet::lattice_patch(1.0, 4);
        assert_eq!(dilate_set(&z, 1.0).unwrap(), z);
        assert_eq!(dilate_set(&z, 0.5).unwrap().points(), AtomSet::lattice_patch(0.5, 4).points());
        assert!(dilate_set(&z, 0.0).is_err());
    }

    #[test]
    fn torus_grid_requires_integer_area() {
        let pbox = PeriodicBox { width_x: 16.0, width_omega: 16.0 };
        assert!(torus_grid(pbox, 1.0).is_ok());
        assert!(torus_grid(pbox, 0.99).is_err());
        let a = snap_alpha_to_torus(pbox, 0.99);
        let g = torus_grid(pbox, a).unwrap();
        assert_eq!(g.len(), 251);
        assert!((1.0 / g.dt() - a * 16.0).abs() < 1e-9);
    }

    #[test]
    fn periodic_box_must_contain_nodes() {
        let set = AtomSet::lattice_patch(1.0, 4);
        assert!(set.clone().with_periodic_box(PeriodicBox { width_x: 2.0, width_omega: 8.0 }).is_err());
        assert!(set.with_periodic_box(PeriodicBox { width_x: 4.0, width_omega: 4.0 }).is_ok());
    }
}
