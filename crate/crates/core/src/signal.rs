use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, PhaseSpaceGrid, TFPoint};
use crate::window::gaussian;

/// Complex samples of a function on the periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    grid: GridSpec,
    samples: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, samples: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f(t_n)`; panics on non-finite values, which indicates a bug in
    /// the caller's function.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let samples: Vec<Complex64> = grid.times().map(f).collect();
        Self::new(grid, samples).expect("function produced non-finite samples")
    }

    pub(crate) fn from_raw(grid: GridSpec, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Discrete inner product `Σ f ḡ · dt`.
    pub fn inner(&self, other: &SampledSignal) -> Complex64 {
        debug_assert_eq!(self.grid, other.grid);
        let s: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum();
        s * self.grid.dt()
    }

    pub fn norm(&self) -> f64 {
        (self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dt()).sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_raw(self.grid, self.samples.iter().map(|v| v * c).collect())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidInput("cannot normalize the zero signal".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn sub(&self, other: &SampledSignal) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self::from_raw(self.grid, self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &SampledSignal) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self::from_raw(self.grid, self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect())
    }

    pub fn same_grid(&self, other: &SampledSignal) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::IncompatibleGrids(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    /// Value of the trigonometric interpolant at an arbitrary time. Costs
    /// O(L) per call; intended for oracles and small evaluations.
    pub fn interpolate(&self, t: f64) -> Complex64 {
        let l = self.grid.len();
        let mut spec = self.samples.clone();
        crate::fft::forward(&mut spec);
        let u = (t - self.grid.t0()) / self.grid.dt();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in spec.iter().enumerate() {
            let kk = crate::fft::signed_index(j, l);
            if l.is_multiple_of(2) && kk == -(l as i64) / 2 {
                // split the Nyquist bin symmetrically so real signals stay real
                let ph = std::f64::consts::PI * u;
                acc += c * Complex64::new(ph.cos(), 0.0);
            } else {
                let ph = 2.0 * std::f64::consts::PI * kk as f64 * u / l as f64;
                acc += c * Complex64::from_polar(1.0, ph);
            }
        }
        acc / l as f64
    }
}

/// Complex samples on a phase-space grid, stored row-major with the
/// position index outermost: `values[m * nw + k] ≈ F(x_m, ω_k)`.
/// Unit-norm random superposition of `count` Gaussian atoms `π(z)φ` with
/// nodes uniform in `[-radius, radius]²` and random complex amplitudes:
/// smooth, and numerically limited to a box in time and in frequency.
pub fn random_smooth(grid: GridSpec, count: usize, radius: f64, seed: u64) -> Result<SampledSignal> {
    if count == 0 || !(radius >= 0.0) {
        return Err(Error::Parameter(format!("invalid random signal parameters count={count}, radius={radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<(TFPoint, Complex64)> = (0..count)
        .map(|_| {
            let z = TFPoint::new(radius * (2.0 * rng.gen::<f64>() - 1.0), radius * (2.0 * rng.gen::<f64>() - 1.0));
            let c = Complex64::from_polar(0.5 + rng.gen::<f64>(), 2.0 * PI * rng.gen::<f64>());
            (z, c)
        })
        .collect();
    let f = SampledSignal::from_fn(grid, |t| {
        atoms
            .iter()
            .map(|(z, c)| c * Complex64::from_polar(gaussian(t - z.x), 2.0 * PI * z.omega * t))
            .sum()
    });
    f.normalized()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceFunction {
    psgrid: PhaseSpaceGrid,
    values: Vec<Complex64>,
}

impl PhaseSpaceFunction {
    pub fn new(psgrid: PhaseSpaceGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != psgrid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {}×{} values, got {}",
                psgrid.nx(),
                psgrid.nw(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { psgrid, values })
    }

    pub fn zeros(psgrid: PhaseSpaceGrid) -> Self {
        Self { psgrid, values: vec![Complex64::new(0.0, 0.0); psgrid.len()] }
    }

    pub fn from_fn(psgrid: PhaseSpaceGrid, f: impl Fn(TFPoint) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(psgrid.len());
        for m in 0..psgrid.nx() {
            for k in 0..psgrid.nw() {
                values.push(f(psgrid.point(m, k)));
            }
        }
        Self::new(psgrid, values).expect("function produced non-finite values")
    }

    pub(crate) fn from_raw(psgrid: PhaseSpaceGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), psgrid.len());
        Self { psgrid, values }
    }

    pub fn psgrid(&self) -> &PhaseSpaceGrid {
        &self.psgrid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, m: usize, k: usize) -> Complex64 {
        self.values[m * self.psgrid.nw() + k]
    }

    /// `(Σ |F|² dx dω)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.psgrid.cell_area()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_raw(self.psgrid, self.values.iter().map(|v| v * c).collect())
    }

    pub fn sub(&self, other: &PhaseSpaceFunction) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self::from_raw(self.psgrid, self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect()))
    }

    pub fn add(&self, other: &PhaseSpaceFunction) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self::from_raw(self.psgrid, self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect()))
    }

    /// Pointwise product with a real mask evaluated at the nodes.
    pub fn masked(&self, mask: impl Fn(TFPoint) -> f64) -> Self {
        let nw = self.psgrid.nw();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * mask(self.psgrid.point(i / nw, i % nw)))
            .collect();
        Self::from_raw(self.psgrid, values)
    }

    pub fn same_grid(&self, other: &PhaseSpaceFunction) -> Result<()> {
        if self.psgrid != other.psgrid {
            return Err(Error::IncompatibleGrids(format!("{:?} vs {:?}", self.psgrid, other.psgrid)));
        }
        Ok(())
    }
}
