//! Analysis windows: closed-form families that can be evaluated at arbitrary
//! times (needed for periodized atoms and the lattice oracle) and arbitrary
//! sampled windows.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::signal::SampledSignal;

/// Closed-form window families, each normalized to unit `L²(ℝ)` norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowSpec {
    /// `2^{1/4} e^{-πt²}`.
    Gaussian,
    /// Hermite function of the given order, built on the same Gaussian.
    Hermite { order: usize },
    /// `cos²(πt/(2T))` on `|t| < T`: continuously differentiable, compactly
    /// supported, with Fourier decay `|ω|^{-3}`.
    RaisedCosine { half_width: f64 },
    /// `exp(-πt² - |t|^β)`: smooth except for a cusp at the origin, so the
    /// Fourier transform decays like `|ω|^{-1-β}`.
    Cusp { exponent: f64 },
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WindowSpec::Gaussian | WindowSpec::Hermite { .. } => Ok(()),
            WindowSpec::RaisedCosine { half_width } if half_width.is_finite() && half_width > 0.0 => Ok(()),
            WindowSpec::RaisedCosine { half_width } => {
                Err(Error::Parameter(format!("raised cosine half width must be positive, got {half_width}")))
            }
            WindowSpec::Cusp { exponent } if exponent.is_finite() && exponent > 0.0 => Ok(()),
            WindowSpec::Cusp { exponent } => {
                Err(Error::Parameter(format!("cusp exponent must be positive, got {exponent}")))
            }
        }
    }

    /// Compile into an evaluable window with its normalization constant.
    pub fn build(&self) -> Result<Window> {
        self.validate()?;
        let norm = base_norm(self);
        Ok(Window { source: Source::Analytic(self.clone()), scale: 1.0, amplitude: 1.0 / norm })
    }

    pub fn label(&self) -> String {
        match *self {
            WindowSpec::Gaussian => "gaussian".into(),
            WindowSpec::Hermite { order } => format!("hermite{order}"),
            WindowSpec::RaisedCosine { half_width } => format!("raised_cosine(T={half_width})"),
            WindowSpec::Cusp { exponent } => format!("cusp(beta={exponent})"),
        }
    }
}

/// An evaluable window `t ↦ amplitude · shape(scale · t)`, where the shape
/// is either a closed form or the trigonometric interpolant of samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    source: Source,
    scale: f64,
    amplitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
enum Source {
    Analytic(WindowSpec),
    Samples { signal: SampledSignal, radius: f64 },
}

impl Window {
    pub fn gaussian() -> Self {
        WindowSpec::Gaussian.build().expect("gaussian is always valid")
    }

    /// Window given by samples, evaluated off-grid by trigonometric
    /// interpolation (O(L) per evaluation). The support radius is the
    /// smallest centered radius holding all but 1e−28 of the energy.
    pub fn from_samples(signal: SampledSignal) -> Self {
        let grid = *signal.grid();
        let total: f64 = signal.samples().iter().map(|v| v.norm_sqr()).sum();
        let mut radius = grid.period() / 2.0;
        if total > 0.0 {
            let mut order: Vec<(f64, f64)> =
                grid.times().zip(signal.samples()).map(|(t, v)| (t.abs(), v.norm_sqr())).collect();
            order.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut tail = 0.0;
            for (r, e) in order {
                tail += e;
                if tail > 1e-28 * total {
                    radius = r + grid.dt();
                    break;
                }
            }
        }
        Self { source: Source::Samples { signal, radius }, scale: 1.0, amplitude: 1.0 }
    }

    pub fn spec(&self) -> Option<&WindowSpec> {
        match &self.source {
            Source::Analytic(spec) => Some(spec),
            Source::Samples { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.source {
            Source::Analytic(spec) => spec.label(),
            Source::Samples { .. } => "samples".into(),
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match &self.source {
            Source::Analytic(spec) => Complex64::new(self.amplitude * shape(spec, self.scale * t), 0.0),
            Source::Samples { signal, radius } => {
                let u = self.scale * t;
                if u.abs() > *radius {
                    Complex64::new(0.0, 0.0)
                } else {
                    signal.interpolate(u) * self.amplitude
                }
            }
        }
    }

    /// Radius outside of which the window is below double precision relevance.
    pub fn support_radius(&self) -> f64 {
        let r = match &self.source {
            Source::Analytic(WindowSpec::Gaussian) | Source::Analytic(WindowSpec::Cusp { .. }) => 6.0,
            Source::Analytic(WindowSpec::Hermite { order }) => 6.0 + (*order as f64).sqrt(),
            Source::Analytic(WindowSpec::RaisedCosine { half_width }) => *half_width,
            Source::Samples { radius, .. } => *radius,
        };
        r / self.scale
    }

    /// The dilation `t ↦ g(a t)`; closed forms are re-evaluated exactly.
    pub fn dilated(&self, a: f64) -> Self {
        Self { source: self.source.clone(), scale: self.scale * a, amplitude: self.amplitude }
    }

    /// Continuous `L²` norm (exact for the closed forms, discrete for samples).
    pub fn l2_norm(&self) -> f64 {
        match &self.source {
            // closed forms are built with unit norm
            Source::Analytic(_) => 1.0 / self.scale.sqrt(),
            Source::Samples { signal, .. } => self.amplitude * signal.norm() / self.scale.sqrt(),
        }
    }

    pub fn sample(&self, grid: GridSpec) -> SampledSignal {
        SampledSignal::from_fn(grid, |t| self.eval(t))
    }
}

fn base_norm(spec: &WindowSpec) -> f64 {
    match *spec {
        WindowSpec::Gaussian | WindowSpec::Hermite { .. } => 1.0,
        WindowSpec::RaisedCosine { half_width } => (0.75 * half_width).sqrt(),
        WindowSpec::Cusp { exponent } => cusp_norm(exponent),
    }
}

fn shape(spec: &WindowSpec, t: f64) -> f64 {
    match *spec {
        WindowSpec::Gaussian => gaussian(t),
        WindowSpec::Hermite { order } => hermite_function(order, t),
        WindowSpec::RaisedCosine { half_width } => {
            if t.abs() < half_width {
                (PI * t / (2.0 * half_width)).cos().powi(2)
            } else {
                0.0
            }
        }
        WindowSpec::Cusp { exponent } => (-PI * t * t - t.abs().powf(exponent)).exp(),
    }
}

/// The standard Gaussian `2^{1/4} e^{-πt²}`.
pub fn gaussian(t: f64) -> f64 {
    2f64.powf(0.25) * (-PI * t * t).exp()
}

/// Unit-norm Hermite function of order `n` for the Gaussian `2^{1/4}e^{-πt²}`,
/// by the stable three-term recurrence.
pub fn hermite_function(n: usize, t: f64) -> f64 {
    let u = (2.0 * PI).sqrt() * t;
    let mut prev = 0.0;
    let mut cur = gaussian(t);
    for k in 0..n {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * u * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `‖exp(-πt² - |t|^β)‖₂` by composite Simpson after the substitution
/// `t = u⁴`, which smooths the cusp at the origin.
fn cusp_norm(beta: f64) -> f64 {
    let f = |t: f64| (-2.0 * PI * t * t - 2.0 * t.abs().powf(beta)).exp();
    let umax = 7f64.powf(0.25);
    let n = 40_000usize;
    let h = umax / n as f64;
    let g = |u: f64| f(u.powi(4)) * 4.0 * u.powi(3);
    let mut acc = g(0.0) + g(umax);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(i as f64 * h);
    }
    (2.0 * acc * h / 3.0).sqrt()
}

/// Input to [`make_window`].
#[derive(Clone, Debug, PartialEq)]
pub enum WindowKind {
    Analytic(WindowSpec),
    Samples(Vec<Complex64>),
}

/// Window samples on `grid`, normalized to unit norm in the discrete inner
/// product.
pub fn make_window(kind: &WindowKind, grid: GridSpec) -> Result<SampledSignal> {
    let raw = match kind {
        WindowKind::Analytic(spec) => spec.build()?.sample(grid),
        WindowKind::Samples(v) => SampledSignal::new(grid, v.clone())?,
    };
    raw.normalized()
}
