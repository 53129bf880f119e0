//! Weyl quantization of sampled symbols and spectral quantities of the
//! resulting operators.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{GridSpec, PhaseSpaceGrid};
use crate::linalg;
use crate::signal::{PhaseSpaceFunction, SampledSignal};

/// Largest dimension handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 2048;

/// Relative tolerance on the Hermitian defect accepted by spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Dense operator on sampled signals. Applying it to a sample vector
/// approximates the continuous operator: `(T f)[a] = Σ_b entries[a,b] f[b]`,
/// with the quadrature weight `dt` already folded into the entries.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    dt: f64,
    hermitian_defect: f64,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>, dt: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::InvalidInput(format!(
                "operator matrix must be square, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if let Some(i) = entries.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        let n = entries.nrows();
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                defect = defect.max((entries[(i, j)] - entries[(j, i)].conj()).norm());
            }
        }
        Ok(Self { entries, dt, hermitian_defect: defect })
    }

    pub fn identity(n: usize, dt: f64) -> Self {
        Self::new(DMatrix::identity(n, n), dt).expect("identity is valid")
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.hermitian_defect
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect <= HERMITIAN_TOL * self.max_entry()
    }

    pub fn apply(&self, f: &SampledSignal) -> Result<SampledSignal> {
        if f.grid().len() != self.dim() {
            return Err(Error::IncompatibleGrids(format!(
                "signal of length {} for operator of dimension {}",
                f.grid().len(),
                self.dim()
            )));
        }
        let v = DVector::from_column_slice(f.samples());
        let out = &self.entries * v;
        SampledSignal::new(*f.grid(), out.as_slice().to_vec())
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidInput("operator dimensions differ".into()));
        }
        OperatorMatrix::new(&self.entries - &other.entries, self.dt)
    }
}

/// Extreme spectral values `σ₋ ≤ σ₊` of a self-adjoint operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEdges {
    pub sigma_minus: f64,
    pub sigma_plus: f64,
}

/// Weyl quantization `σ^w` with kernel
/// `K(y,x) = ∫ σ((x+y)/2, ω) e^{2πi(y−x)ω} dω`.
///
/// The symbol must be sampled on [`PhaseSpaceGrid::symbol_grid`], so every
/// midpoint of two samples is a node and the ω-integral is a single inverse
/// FFT per midpoint. Pairs of samples are joined through their shorter
/// periodic separation.
pub fn weyl_quantize(sigma: &PhaseSpaceFunction, grid: &GridSpec) -> Result<OperatorMatrix> {
    let expected = PhaseSpaceGrid::symbol_grid(grid)?;
    let got = sigma.psgrid();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if got.nx() != expected.nx()
        || got.nw() != expected.nw()
        || !close(got.dx(), expected.dx())
        || !close(got.dw(), expected.dw())
    {
        return Err(Error::IncompatibleGrids(format!(
            "symbol must be sampled at dt/2 in position and at the bin spacing in frequency ({}×{} nodes, dx={}, dω={})",
            expected.nx(),
            expected.nw(),
            expected.dx(),
            expected.dw()
        )));
    }
    let l = grid.len();
    let nx = 2 * l;
    // kernel[p][d mod L] = dω Σ_j σ(x_p, ω_j) e^{2πi d dt ω_j}; since
    // dt·dω = 1/L and ω_0 = −1/(2dt), this is (−1)^d dω · IFFT(row)[d].
    let dw = expected.dw();
    let mut kernel = sigma.values().to_vec();
    kernel.par_chunks_mut(l).for_each(|row| {
        fft::inverse(row);
        for (d, v) in row.iter_mut().enumerate() {
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            *v *= sign * dw;
        }
    });
    let dt = grid.dt();
    let entries = DMatrix::from_fn(l, l, |a, b| {
        let d = fft::signed_index((a + l - b) % l, l);
        // midpoint t_b + d·dt/2 on the half-sample lattice
        let p = (2 * b as i64 + d).rem_euclid(nx as i64) as usize;
        let dm = d.rem_euclid(l as i64) as usize;
        kernel[p * l + dm] * dt
    });
    OperatorMatrix::new(entries, dt)
}

/// `σ₋(T)` and `σ₊(T)`: dense Hermitian eigenvalues up to [`DENSE_LIMIT`],
/// Lanczos with full reorthogonalization above.
pub fn spectral_edges(t: &OperatorMatrix) -> Result<SpectralEdges> {
    if !t.is_hermitian() {
        return Err(Error::NotHermitian { defect: t.hermitian_defect(), scale: t.max_entry() });
    }
    if t.dim() <= DENSE_LIMIT {
        let (lo, hi) = linalg::dense_extreme_eigenvalues(t.entries());
        Ok(SpectralEdges { sigma_minus: lo, sigma_plus: hi })
    } else {
        spectral_edges_lanczos(t)
    }
}

/// Lanczos route of [`spectral_edges`], exposed so it can be checked against
/// the dense solver at moderate sizes.
pub fn spectral_edges_lanczos(t: &OperatorMatrix) -> Result<SpectralEdges> {
    if !t.is_hermitian() {
        return Err(Error::NotHermitian { defect: t.hermitian_defect(), scale: t.max_entry() });
    }
    let h = linalg::hermitian_part(t.entries());
    let r = linalg::lanczos_extremes(t.dim(), |v| &h * v, 1e-8, t.dim().min(1500));
    Ok(SpectralEdges { sigma_minus: r.min, sigma_plus: r.max })
}

/// Largest singular value by power iteration on `T*T`, stopped at relative
/// residual 1e−8. If the iteration stalls (clustered top singular values) it
/// falls back to Lanczos on `T*T`.
pub fn operator_norm(t: &OperatorMatrix) -> f64 {
    let n = t.dim();
    let m = t.entries();
    let gram_apply = |v: &DVector<Complex64>| m.ad_mul(&(m * v));
    let mut v = linalg::random_unit_vector(n, linalg::START_VECTOR_SEED);
    let mut mu = 0.0;
    for _ in 0..2000 {
        let w = gram_apply(&v);
        let wn = w.norm();
        if wn == 0.0 {
            return 0.0;
        }
        mu = v.dotc(&w).re;
        let residual = (&w - &v * Complex64::new(mu, 0.0)).norm();
        v = w / Complex64::new(wn, 0.0);
        if residual <= 1e-8 * mu.abs() {
            return mu.max(0.0).sqrt();
        }
    }
    let r = linalg::lanczos_extremes(n, gram_apply, 1e-10, n.min(1500));
    r.max.max(mu).max(0.0).sqrt()
}

/// The radial derivative `(Σ_i z_i ∂_i F)(z) = x ∂_x F + ω ∂_ω F`, with the
/// partial derivatives computed spectrally along each periodic axis.
pub fn radial_derivative(f: &PhaseSpaceFunction) -> PhaseSpaceFunction {
    let ps = *f.psgrid();
    let (nx, nw) = (ps.nx(), ps.nw());
    let mut d_omega = f.values().to_vec();
    for m in 0..nx {
        spectral_derivative(&mut d_omega[m * nw..(m + 1) * nw], ps.dw());
    }
    let mut d_x = vec![Complex64::new(0.0, 0.0); nx * nw];
    let mut col = vec![Complex64::new(0.0, 0.0); nx];
    for k in 0..nw {
        for m in 0..nx {
            col[m] = f.values()[m * nw + k];
        }
        spectral_derivative(&mut col, ps.dx());
        for m in 0..nx {
            d_x[m * nw + k] = col[m];
        }
    }
    let values = (0..nx * nw)
        .map(|i| {
            let z = ps.point(i / nw, i % nw);
            d_x[i] * z.x + d_omega[i] * z.omega
        })
        .collect();
    PhaseSpaceFunction::from_raw(ps, values)
}

fn spectral_derivative(v: &mut [Complex64], step: f64) {
    let n = v.len();
    fft::forward(v);
    let period = n as f64 * step;
    for (j, c) in v.iter_mut().enumerate() {
        let k = fft::signed_index(j, n);
        if n.is_multiple_of(2) && k == -(n as i64) / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::new(0.0, 2.0 * PI * k as f64 / period);
        }
    }
    fft::inverse(v);
    let inv = 1.0 / n as f64;
    v.iter_mut().for_each(|c| *c *= inv);
}
