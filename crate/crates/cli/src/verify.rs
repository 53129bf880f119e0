//! `verify`: a fixed battery of identities and properties, each reported
//! as `{name, value, threshold, relation, pass}`. Random corpora derive
//! from the run seed, so the report is a function of the configuration.

use anyhow::Result;
use gabor_core::gabor::{frame_bounds, frame_operator, frame_symbol, periodized_frame_bounds};
use gabor_core::signal::random_smooth;
use gabor_core::tfcore::{istft, stft, stft_at, tf_shift, wigner};
use gabor_core::weyl::{operator_norm, spectral_edges, weyl_quantize};
use gabor_core::zak::zak_lattice_bounds;
use gabor_core::{
    make_window, AtomSet, Complex64, GridSpec, OperatorMatrix, PhaseSpaceFunction, PhaseSpaceGrid, SampledSignal,
    TFPoint, Window, WindowKind, WindowSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, VerifyParams};
use crate::{Artifact, Outcome, Status};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"<="` or `">="`: how `value` must compare with `threshold`.
    pub relation: &'static str,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: "<=", pass: value <= threshold }
    }

    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: ">=", pass: value >= threshold }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn phi(grid: GridSpec) -> Result<SampledSignal> {
    Ok(make_window(&WindowKind::Analytic(WindowSpec::Gaussian), grid)?)
}

fn stft_isometry(seed: u64) -> Result<Check> {
    let grid = GridSpec::default();
    let g = phi(grid)?;
    let ps = PhaseSpaceGrid::default();
    let errs: Vec<f64> = (0..5)
        .into_par_iter()
        .map(|i| {
            let f = random_smooth(grid, 8, 4.0, seed.wrapping_add(i))?;
            Ok((stft(&f, &g, &ps)?.l2_norm() / f.norm() - 1.0).abs())
        })
        .collect::<Result<_>>()?;
    Ok(Check::at_most("stft_isometry", errs.into_iter().fold(0.0, f64::max), 1e-6))
}

fn stft_covariance(seed: u64) -> Result<Check> {
    let grid = GridSpec::default();
    let g = phi(grid)?;
    let f = random_smooth(grid, 4, 2.0, seed)?;
    let bin = grid.freq_step();
    let shifts: Vec<TFPoint> = (0..5).map(|i| TFPoint::new(0.37 * i as f64 - 0.8, (7 * i) as f64 * bin - 0.5)).collect();
    let probes: Vec<TFPoint> = (0..5).map(|j| TFPoint::new(0.5 * j as f64 - 1.0, (3 * j) as f64 * bin - 0.25)).collect();
    let mut worst: f64 = 0.0;
    for z1 in &shifts {
        let moved = tf_shift(&f, *z1);
        for z2 in &probes {
            let lhs = stft_at(&moved, &g, *z2)?.norm();
            let rhs = stft_at(&f, &g, *z2 - *z1)?.norm();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(Check::at_most("stft_covariance", worst, 1e-8))
}

fn istft_inversion(seed: u64) -> Result<Check> {
    let grid = GridSpec::default();
    let g = phi(grid)?;
    let f = random_smooth(grid, 8, 4.0, seed)?;
    let syn = istft(&stft(&f, &g, &PhaseSpaceGrid::default())?, &g)?;
    Ok(Check::at_most("istft_inversion", syn.signal.sub(&f).norm() / f.norm(), 1e-4))
}

fn wigner_moyal(seed: u64) -> Result<Check> {
    let grid = GridSpec::default();
    let ps = PhaseSpaceGrid::default();
    let f = random_smooth(grid, 5, 3.0, seed)?;
    let h = random_smooth(grid, 3, 3.0, seed.wrapping_add(1))?.scaled(Complex64::new(0.5, 0.0));
    let w = wigner(&f, &h, &ps)?;
    let l2 = (w.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * ps.cell_area()).sqrt();
    Ok(Check::at_most("wigner_moyal", (l2 / (f.norm() * h.norm()) - 1.0).abs(), 1e-5))
}

/// Extreme eigenvalues move by at most the operator norm of the
/// perturbation; the pairs are Weyl quantizations of real Wigner symbols.
fn spectral_edge_pairs(seed: u64) -> Result<Check> {
    let grid = GridSpec::centered(64, 1.0 / 8.0)?;
    let ps = PhaseSpaceGrid::symbol_grid(&grid)?;
    let symbol = |k: u64| -> Result<PhaseSpaceFunction> {
        let f = random_smooth(grid, 3, 2.0, seed.wrapping_add(k))?;
        let w = wigner(&f, &f, &ps)?;
        Ok(PhaseSpaceFunction::new(ps, w.values().iter().map(|v| Complex64::new(v.re, 0.0)).collect())?)
    };
    let excess: Vec<f64> = (0..20u64)
        .into_par_iter()
        .map(|i| {
            let s1 = symbol(2 * i)?;
            let scale = 0.05 * (i + 1) as f64;
            let s2 = s1.add(&symbol(2 * i + 1)?.scaled(Complex64::new(scale, 0.0)))?;
            let (t1, t2) = (weyl_quantize(&s1, &grid)?, weyl_quantize(&s2, &grid)?);
            let (e1, e2) = (spectral_edges(&t1)?, spectral_edges(&t2)?);
            let diff = operator_norm(&t1.sub(&t2)?);
            let moved = (e1.sigma_plus - e2.sigma_plus).abs().max((e1.sigma_minus - e2.sigma_minus).abs());
            Ok((moved - diff) / diff)
        })
        .collect::<Result<_>>()?;
    Ok(Check::at_most("spectral_edges_lipschitz", excess.into_iter().fold(f64::NEG_INFINITY, f64::max), 1e-8))
}

fn cross_route_error(l: usize, set: &AtomSet) -> Result<f64> {
    let grid = GridSpec::centered(l, 1.0 / 32.0)?;
    let g = phi(grid)?;
    let direct = frame_operator(&g, &g, set)?;
    let via_symbol = weyl_quantize(&frame_symbol(&g, &g, set, 0.0)?, &grid)?;
    Ok(operator_norm(&direct.sub(&via_symbol)?) / operator_norm(&direct))
}

fn cross_route() -> Result<Vec<Check>> {
    let set = AtomSet::lattice_patch(1.0, 12);
    let coarse = cross_route_error(512, &set)?;
    let fine = cross_route_error(1024, &set)?;
    Ok(vec![
        Check::at_most("cross_route_512", coarse, 1e-2),
        Check::at_most("cross_route_1024", fine, (coarse / 2.0).max(1e-10)),
    ])
}

fn frame_operator_psd(seed: u64) -> Result<Check> {
    let grid = GridSpec::centered(256, 1.0 / 16.0)?;
    let g = phi(grid)?;
    let ratios: Vec<f64> = (0..4u64)
        .into_par_iter()
        .map(|i| {
            let set = AtomSet::random_separated(20, 0.3, 4.0, seed.wrapping_add(i))?;
            let e = spectral_edges(&frame_operator(&g, &g, &set)?)?;
            Ok(e.sigma_minus / e.sigma_plus)
        })
        .collect::<Result<_>>()?;
    Ok(Check::at_least("frame_operator_psd", ratios.into_iter().fold(f64::INFINITY, f64::min), -1e-8))
}

fn weyl_identity() -> Result<Check> {
    let grid = GridSpec::centered(256, 1.0 / 16.0)?;
    let ps = PhaseSpaceGrid::symbol_grid(&grid)?;
    let t = weyl_quantize(&PhaseSpaceFunction::from_fn(ps, |_| Complex64::new(1.0, 0.0)), &grid)?;
    let id = OperatorMatrix::identity(grid.len(), grid.dt());
    Ok(Check::at_most("weyl_identity", operator_norm(&t.sub(&id)?), 1e-6))
}

/// The Wigner distribution of `φ` quantizes to the projector onto `φ`,
/// whose top eigenvalue is 1 and whose second is 0.
fn weyl_projector() -> Result<Check> {
    let grid = GridSpec::centered(512, 1.0 / 32.0)?;
    let g = phi(grid)?;
    let ps = PhaseSpaceGrid::symbol_grid(&grid)?;
    let t = weyl_quantize(&wigner(&g, &g, &ps)?, &grid)?;
    let image = t.apply(&g)?;
    let err = image.sub(&g).norm().max((operator_norm(&t) - 1.0).abs());
    Ok(Check::at_most("weyl_projector", err, 1e-3))
}

fn half_lattice_routes() -> Result<Check> {
    let window = Window::gaussian();
    let periodic = periodized_frame_bounds(&window, &AtomSet::periodic_lattice(0.5, 32)?, 1.0)?;
    let oracle = zak_lattice_bounds(&window, 1, 2, 32)?;
    let dev = (periodic.lower / oracle.lower - 1.0).abs().max((periodic.upper / oracle.upper - 1.0).abs());
    Ok(Check::at_most("zak_vs_periodized_half_lattice", dev, 1e-2))
}

/// Shifting the node set by a sampling-lattice point leaves the bounds
/// unchanged.
fn shift_invariance(seed: u64) -> Result<Check> {
    let grid = GridSpec::centered(256, 1.0 / 16.0)?;
    let g = phi(grid)?;
    let set = AtomSet::jittered_grid(1.0, 6, 0.5, seed);
    let z = TFPoint::new(7.0 * grid.dt(), -5.0 * grid.freq_step());
    let (a, b) = (frame_bounds(&g, &set)?, frame_bounds(&g, &set.shifted(z))?);
    let dev = (a.upper - b.upper).abs().max((a.lower - b.lower).abs()) / a.upper;
    Ok(Check::at_most("frame_bounds_shift_invariance", dev, 1e-6))
}

pub fn checks(seed: u64) -> Result<Vec<Check>> {
    let mut out = vec![
        stft_isometry(seed)?,
        stft_covariance(seed)?,
        istft_inversion(seed)?,
        wigner_moyal(seed)?,
        spectral_edge_pairs(seed)?,
    ];
    out.extend(cross_route()?);
    out.push(frame_operator_psd(seed)?);
    out.push(shift_invariance(seed)?);
    out.push(weyl_identity()?);
    out.push(weyl_projector()?);
    out.push(half_lattice_routes()?);
    Ok(out)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let p: VerifyParams = cfg.params()?;
    let checks = checks(cfg.seed)?;
    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport { seed: cfg.seed, checks, pass };
    Ok(Outcome {
        status: Status::from_check(pass),
        artifacts: vec![Artifact::json("verify.json", &report)?],
        effective_params: serde_json::to_value(&p)?,
    })
}
