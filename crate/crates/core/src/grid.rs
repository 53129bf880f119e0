use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic sampling of the line: `L` samples at spacing `dt`
/// starting at `t0`, treated as one period of length `L·dt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    num_samples: usize,
    dt: f64,
    t0: f64,
}

impl GridSpec {
    /// Minimum period; default windows must fit inside the box.
    pub const MIN_PERIOD: f64 = 8.0;

    /// Grid with a power-of-two number of samples.
    pub fn new(num_samples: usize, dt: f64, t0: f64) -> Result<Self> {
        if !num_samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "number of samples must be a power of two, got {num_samples}"
            )));
        }
        Self::periodic(num_samples, dt, t0)
    }

    /// Grid with an arbitrary number of samples. Used by periodized
    /// experiments where the period is tied to the torus of a node set.
    pub fn periodic(num_samples: usize, dt: f64, t0: f64) -> Result<Self> {
        if num_samples < 2 {
            return Err(Error::InvalidGrid(format!("need at least two samples, got {num_samples}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be positive and finite, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidGrid(format!("t0 must be finite, got {t0}")));
        }
        let period = num_samples as f64 * dt;
        if period < Self::MIN_PERIOD * (1.0 - 1e-12) {
            return Err(Error::InvalidGrid(format!(
                "period L·dt = {period} is below the minimum {}",
                Self::MIN_PERIOD
            )));
        }
        Ok(Self { num_samples, dt, t0 })
    }

    /// Power-of-two grid centered at the origin, covering `[-L·dt/2, L·dt/2)`.
    pub fn centered(num_samples: usize, dt: f64) -> Result<Self> {
        Self::new(num_samples, dt, -(num_samples as f64) * dt / 2.0)
    }

    pub fn len(&self) -> usize {
        self.num_samples
    }

    pub fn is_empty(&self) -> bool {
        self.num_samples == 0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn period(&self) -> f64 {
        self.num_samples as f64 * self.dt
    }

    /// Spacing of the DFT frequency bins, `1/(L·dt)`.
    pub fn freq_step(&self) -> f64 {
        1.0 / self.period()
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_samples).map(move |n| self.time(n))
    }

    pub fn is_centered(&self) -> bool {
        (self.t0 + self.period() / 2.0).abs() <= 1e-12 * self.period()
    }

    /// Same grid with the number of samples doubled and the spacing kept,
    /// i.e. a box of twice the length.
    pub fn widened(&self) -> Result<Self> {
        Self::periodic(2 * self.num_samples, self.dt, self.t0 * 2.0)
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { num_samples: 1024, dt: 1.0 / 32.0, t0: -16.0 }
    }
}

/// A point `z = (x, ω)` of phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TFPoint {
    pub x: f64,
    pub omega: f64,
}

impl TFPoint {
    pub fn new(x: f64, omega: f64) -> Self {
        Self { x, omega }
    }

    pub fn origin() -> Self {
        Self { x: 0.0, omega: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.omega.is_finite()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.omega)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { x: a * self.x, omega: a * self.omega }
    }
}

impl std::ops::Sub for TFPoint {
    type Output = TFPoint;
    fn sub(self, rhs: TFPoint) -> TFPoint {
        TFPoint { x: self.x - rhs.x, omega: self.omega - rhs.omega }
    }
}

impl std::ops::Add for TFPoint {
    type Output = TFPoint;
    fn add(self, rhs: TFPoint) -> TFPoint {
        TFPoint { x: self.x + rhs.x, omega: self.omega + rhs.omega }
    }
}

/// Uniform grid on the centered phase-space box `[-X, X) × [-Ω, Ω)` with
/// `X = nx·dx/2` and `Ω = nw·dw/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    nx: usize,
    dx: f64,
    nw: usize,
    dw: f64,
}

impl PhaseSpaceGrid {
    pub fn centered(nx: usize, dx: f64, nw: usize, dw: f64) -> Result<Self> {
        if nx == 0 || nw == 0 {
            return Err(Error::InvalidGrid("phase-space grid needs at least one node per axis".into()));
        }
        if !(dx.is_finite() && dx > 0.0 && dw.is_finite() && dw > 0.0) {
            return Err(Error::InvalidGrid(format!("steps must be positive, got dx={dx}, dw={dw}")));
        }
        Ok(Self { nx, dx, nw, dw })
    }

    /// Square grid with `n × n` nodes covering `[-half_width, half_width)²`.
    pub fn square(n: usize, half_width: f64) -> Result<Self> {
        let step = 2.0 * half_width / n as f64;
        Self::centered(n, step, n, step)
    }

    /// The grid on which symbols must be sampled for Weyl quantization on
    /// `grid`: positions at spacing `dt/2` over one period, frequencies at the
    /// DFT bin spacing over the full band `[-1/(2dt), 1/(2dt))`.
    pub fn symbol_grid(grid: &GridSpec) -> Result<Self> {
        if !grid.is_centered() {
            return Err(Error::InvalidGrid("symbol grids require a centered signal grid".into()));
        }
        Self::centered(2 * grid.len(), grid.dt() / 2.0, grid.len(), grid.freq_step())
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nw(&self) -> usize {
        self.nw
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dw(&self) -> f64 {
        self.dw
    }

    pub fn x0(&self) -> f64 {
        -(self.nx as f64) * self.dx / 2.0
    }

    pub fn w0(&self) -> f64 {
        -(self.nw as f64) * self.dw / 2.0
    }

    pub fn x(&self, m: usize) -> f64 {
        self.x0() + m as f64 * self.dx
    }

    pub fn omega(&self, k: usize) -> f64 {
        self.w0() + k as f64 * self.dw
    }

    pub fn point(&self, m: usize, k: usize) -> TFPoint {
        TFPoint::new(self.x(m), self.omega(k))
    }

    pub fn len(&self) -> usize {
        self.nx * self.nw
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dw
    }

    pub fn half_widths(&self) -> (f64, f64) {
        (self.nx as f64 * self.dx / 2.0, self.nw as f64 * self.dw / 2.0)
    }

    /// Nearest node to `z`, if `z` lies on the grid within `tol` steps.
    pub fn index_of(&self, z: TFPoint, tol: f64) -> Option<(usize, usize)> {
        let fm = (z.x - self.x0()) / self.dx;
        let fk = (z.omega - self.w0()) / self.dw;
        let (m, k) = (fm.round(), fk.round());
        if (fm - m).abs() > tol || (fk - k).abs() > tol {
            return None;
        }
        if m < 0.0 || k < 0.0 || m >= self.nx as f64 || k >= self.nw as f64 {
            return None;
        }
        Some((m as usize, k as usize))
    }
}

impl Default for PhaseSpaceGrid {
    fn default() -> Self {
        Self { nx: 256, dx: 1.0 / 16.0, nw: 256, dw: 1.0 / 16.0 }
    }
}
