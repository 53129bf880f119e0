//! One function per command. Each parses its parameter block, runs the
//! computation and returns the artifacts; nothing touches the disk here.

use std::fmt::Write as _;

use anyhow::{bail, ensure, Context, Result};
use gabor_core::deform::{
    bound_check, gamma, holder_fit, saturation_experiment, sweep, HolderFit, Side, SweepConfig, FIT_WINDOW,
};
use gabor_core::gabor::{dilate_set, frame_bounds, periodized_frame_bounds, snap_alpha_to_torus};
use gabor_core::io::{fmt_f64, phase_space_to_csv, sweep_to_csv, tradeoff_to_csv};
use gabor_core::modspace::{mixed_norm_signal, mixed_norm_symbol, tradeoff_table, MixedNormParams, TruncationRegion};
use gabor_core::tfcore::{stft, wigner};
use gabor_core::zak::zak_lattice_bounds;
use gabor_core::{make_window, FrameBounds, SampledSignal, WindowKind, WindowSpec};
use serde::Serialize;

use crate::config::{
    default_tradeoff_signal, resolve_atoms, resolve_signal, BoundsRoute, Command, FrameboundsParams, ModnormParams,
    NormTarget, RunConfig, SaturationParams, SignalSpec, StftParams, SweepParams, TradeoffParams, WignerParams,
};
use crate::{plot, verify, Artifact, Outcome, Status};

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Stft => run_stft(cfg),
        Command::Wigner => run_wigner(cfg),
        Command::Modnorm => run_modnorm(cfg),
        Command::Framebounds => run_framebounds(cfg),
        Command::Sweep => run_sweep(cfg),
        Command::Tradeoff => run_tradeoff(cfg),
        Command::Saturation => run_saturation(cfg),
        Command::Verify => verify::run(cfg),
    }
}

fn sampled_window(spec: &WindowSpec, signal: &SampledSignal) -> Result<SampledSignal> {
    make_window(&WindowKind::Analytic(spec.clone()), *signal.grid()).context("window")
}

fn outcome(status: Status, artifacts: Vec<Artifact>, params: &impl Serialize) -> Result<Outcome> {
    Ok(Outcome { status, artifacts, effective_params: serde_json::to_value(params)? })
}

#[derive(Serialize)]
struct StftReport {
    window: String,
    signal_norm: f64,
    stft_norm: f64,
    isometry_error: f64,
}

fn run_stft(cfg: &RunConfig) -> Result<Outcome> {
    let p: StftParams = cfg.params()?;
    let f = resolve_signal(cfg, p.signal.as_ref(), p.grid.build()?, SignalSpec::default())?;
    let g = sampled_window(&p.window, &f)?;
    let v = stft(&f, &g, &p.psgrid.build()?)?;
    let (signal_norm, stft_norm) = (f.norm(), v.l2_norm());
    let report = StftReport {
        window: p.window.label(),
        signal_norm,
        stft_norm,
        isometry_error: (stft_norm / signal_norm - 1.0).abs(),
    };
    let artifacts = vec![Artifact::new("stft.csv", phase_space_to_csv(&v)), Artifact::json("report.json", &report)?];
    outcome(Status::Success, artifacts, &p)
}

#[derive(Serialize)]
struct WignerReport {
    integral: f64,
    l2_norm: f64,
    max_imag: f64,
}

fn run_wigner(cfg: &RunConfig) -> Result<Outcome> {
    let p: WignerParams = cfg.params()?;
    let grid = p.grid.build()?;
    let f = resolve_signal(cfg, p.signal.as_ref(), grid, SignalSpec::default())?;
    let h = match &p.second {
        Some(spec) => spec.build(grid, cfg.seed)?,
        None => f.clone(),
    };
    let ps = p.psgrid.build()?;
    let w = wigner(&f, &h, &ps)?;
    let values = w.values();
    let report = WignerReport {
        integral: values.iter().map(|v| v.re).sum::<f64>() * ps.cell_area(),
        l2_norm: w.l2_norm(),
        max_imag: values.iter().map(|v| v.im.abs()).fold(0.0, f64::max),
    };
    let artifacts = vec![Artifact::new("wigner.csv", phase_space_to_csv(&w)), Artifact::json("report.json", &report)?];
    outcome(Status::Success, artifacts, &p)
}

#[derive(Serialize)]
struct ModnormReport {
    target: NormTarget,
    norm: MixedNormParams,
    value: f64,
}

fn run_modnorm(cfg: &RunConfig) -> Result<Outcome> {
    let p: ModnormParams = cfg.params()?;
    let n = p.norm;
    let norm = MixedNormParams::new(n.p, n.q, n.s, n.t).context("params.norm")?;
    let f = resolve_signal(cfg, p.signal.as_ref(), p.grid.build()?, SignalSpec::default())?;
    let ps = p.psgrid.build()?;
    let value = match p.target {
        NormTarget::Signal => mixed_norm_signal(&f, &norm, &ps)?,
        NormTarget::Wigner => mixed_norm_symbol(&wigner(&f, &f, &ps)?, &norm)?,
    };
    let report = ModnormReport { target: p.target, norm, value };
    outcome(Status::Success, vec![Artifact::json("modnorm.json", &report)?], &p)
}

#[derive(Serialize)]
struct FrameboundsReport {
    #[serde(flatten)]
    bounds: FrameBounds,
    window: String,
    route: BoundsRoute,
    alpha: f64,
    alpha_used: f64,
}

fn run_framebounds(cfg: &RunConfig) -> Result<Outcome> {
    let mut p: FrameboundsParams = cfg.params()?;
    ensure!(p.alpha.is_finite() && p.alpha > 0.0, "params.alpha: must be positive, got {}", p.alpha);
    let window = p.window.build().context("params.window")?;
    let (route, bounds, alpha_used) = match &p.route {
        Some(BoundsRoute::Zak { num, den, resolution }) => {
            if cfg.inputs.atoms.is_some() || p.atoms.is_some() {
                bail!("params.route: the zak route works on the lattice (num/den)ℤ² and takes no node set");
            }
            ensure!(p.alpha == 1.0, "params.alpha: the zak route takes the lattice step from num/den");
            let b = zak_lattice_bounds(&window, *num, *den, *resolution)?;
            (p.route.clone().expect("matched"), b, *num as f64 / *den as f64)
        }
        route => {
            let atoms = resolve_atoms(cfg, p.atoms.as_ref())?;
            let route = route.clone().unwrap_or(match atoms.periodic_box() {
                Some(_) => BoundsRoute::Periodized,
                None => BoundsRoute::Truncated { grid: Default::default() },
            });
            match &route {
                BoundsRoute::Periodized => {
                    let pbox = atoms
                        .periodic_box()
                        .context("params.route: the periodized route needs a periodic node set")?;
                    let used = snap_alpha_to_torus(pbox, p.alpha);
                    (route.clone(), periodized_frame_bounds(&window, &atoms, used)?, used)
                }
                BoundsRoute::Truncated { grid } => {
                    let g = make_window(&WindowKind::Analytic(p.window.clone()), grid.build()?)?;
                    let set = dilate_set(&atoms, p.alpha)?;
                    (route.clone(), frame_bounds(&g, &set)?, p.alpha)
                }
                BoundsRoute::Zak { .. } => unreachable!("handled above"),
            }
        }
    };
    p.route = Some(route.clone());
    let report = FrameboundsReport { bounds, window: p.window.label(), route, alpha: p.alpha, alpha_used };
    outcome(Status::Success, vec![Artifact::json("framebounds.json", &report)?], &p)
}

#[derive(Serialize)]
struct PerSide {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
}

#[derive(Serialize)]
struct SweepReport {
    #[serde(rename = "exponent_A")]
    exponent_a: f64,
    #[serde(rename = "exponent_B")]
    exponent_b: f64,
    #[serde(rename = "constant_A")]
    constant_a: f64,
    #[serde(rename = "constant_B")]
    constant_b: f64,
    /// Largest ratio `|Δσ| / (rel · |1−α|^γ · ‖g‖²)` over both bounds.
    constant: f64,
    r2: PerSide,
    rows_fitted: PerSide,
    s_class: f64,
    gamma: f64,
    min_exponent: f64,
    rel: f64,
    window_norm_sq: f64,
    spread: PerSide,
    max_spread: f64,
    pass: bool,
    fit_window: (f64, f64),
}

/// Fitted increment exponents must reach `γ(s) − EXPONENT_SLACK`.
pub const EXPONENT_SLACK: f64 = 0.1;

fn run_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let p: SweepParams = cfg.params()?;
    let atoms = resolve_atoms(cfg, p.atoms.as_ref())?;
    let sweep_cfg = SweepConfig {
        window: p.window.clone(),
        atoms: atoms.clone(),
        alphas: p.alphas.clone(),
        method: p.method,
        s_class: p.s_class,
        zak_resolution: p.zak_resolution,
    };
    sweep_cfg.validate().context("params")?;
    let result = sweep(&sweep_cfg)?;
    let fit_a: HolderFit = holder_fit(&result, Side::A).context("fitting the lower bound")?;
    let fit_b: HolderFit = holder_fit(&result, Side::B).context("fitting the upper bound")?;
    let g = make_window(&WindowKind::Analytic(p.window.clone()), p.grid.build()?)?;
    let check = bound_check(&result, p.s_class, &g, &atoms, &p.psgrid.build()?)?;
    let gam = gamma(p.s_class)?;
    let min_exponent = gam - EXPONENT_SLACK;
    let spread = |side: Side| check.sides.iter().find(|c| c.side == side).map_or(f64::NAN, |c| c.spread);
    let pass = check.pass && fit_a.exponent >= min_exponent && fit_b.exponent >= min_exponent;
    let report = SweepReport {
        exponent_a: fit_a.exponent,
        exponent_b: fit_b.exponent,
        constant_a: fit_a.constant,
        constant_b: fit_b.constant,
        constant: check.sides.iter().map(|c| c.max_ratio).fold(0.0, f64::max),
        r2: PerSide { a: fit_a.r2, b: fit_b.r2 },
        rows_fitted: PerSide { a: fit_a.rows as f64, b: fit_b.rows as f64 },
        s_class: p.s_class,
        gamma: gam,
        min_exponent,
        rel: check.rel,
        window_norm_sq: check.window_norm_sq,
        spread: PerSide { a: spread(Side::A), b: spread(Side::B) },
        max_spread: gabor_core::deform::MAX_RATIO_SPREAD,
        pass,
        fit_window: FIT_WINDOW,
    };
    let mut artifacts = vec![Artifact::new("sweep.csv", sweep_to_csv(&result)), Artifact::json("report.json", &report)?];
    artifacts.push(Artifact::new("plot.svg", plot::sweep_svg(&result)?));
    outcome(Status::from_check(pass), artifacts, &p)
}

#[derive(Serialize)]
struct RegionReport {
    region: TruncationRegion,
    slope_err: f64,
    slope_growth: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_slope_err: Option<f64>,
    min_slope_growth: f64,
    pass: bool,
}

#[derive(Serialize)]
struct TradeoffReport {
    weights: (f64, f64, f64),
    regions: Vec<RegionReport>,
    pass: bool,
}

/// Slack allowed on the regression slopes of the tradeoff table.
pub const SLOPE_SLACK: f64 = 0.15;

/// Lowest admissible error and growth slopes against `ε` for weights
/// `a ≤ b ≤ c`. On a frequency band the error decays like `ε^{b−a}` and `h`
/// grows like `ε^{−(c−b)}`; on a ball only the growth is constrained, as
/// `ε^{−2(c−b)}`.
pub fn slope_targets(region: TruncationRegion, (a, b, c): (f64, f64, f64)) -> (Option<f64>, f64) {
    match region {
        TruncationRegion::FrequencyBand => (Some((b - a) - SLOPE_SLACK), -(c - b) - SLOPE_SLACK),
        TruncationRegion::PhaseSpaceBall => (None, -2.0 * (c - b) - SLOPE_SLACK),
    }
}

fn run_tradeoff(cfg: &RunConfig) -> Result<Outcome> {
    let mut p: TradeoffParams = cfg.params()?;
    let (a, b, c) = p.weights;
    ensure!(a <= b && b <= c, "params.weights: need a ≤ b ≤ c, got ({a}, {b}, {c})");
    ensure!(p.epsilons.len() >= 2, "params.epsilons: need at least two values");
    ensure!(!p.regions.is_empty(), "params.regions: need at least one region");
    if p.signal.is_none() && cfg.inputs.signal.is_none() {
        p.signal = Some(default_tradeoff_signal());
    }
    let g = resolve_signal(cfg, p.signal.as_ref(), p.grid.build()?, default_tradeoff_signal())?;
    let table = tradeoff_table(&g, p.weights, &p.epsilons, &p.regions, &p.psgrid.build()?)?;
    let regions: Vec<RegionReport> = table
        .slopes
        .iter()
        .map(|s| {
            let (min_err, min_growth) = slope_targets(s.region, p.weights);
            RegionReport {
                region: s.region,
                slope_err: s.slope_err,
                slope_growth: s.slope_growth,
                min_slope_err: min_err,
                min_slope_growth: min_growth,
                pass: min_err.is_none_or(|m| s.slope_err >= m) && s.slope_growth >= min_growth,
            }
        })
        .collect();
    let pass = regions.iter().all(|r| r.pass);
    let report = TradeoffReport { weights: p.weights, regions, pass };
    let artifacts = vec![
        Artifact::new("tradeoff.csv", tradeoff_to_csv(&table)),
        Artifact::json("report.json", &report)?,
        Artifact::new("plot.svg", plot::tradeoff_svg(&table)?),
    ];
    outcome(Status::from_check(pass), artifacts, &p)
}

#[derive(Serialize)]
struct LevelReport {
    resolution: usize,
    #[serde(rename = "exponent_A")]
    exponent_a: f64,
    #[serde(rename = "constant_A")]
    constant_a: f64,
    r2: f64,
    left_slope: f64,
    max_ratio_right: f64,
}

#[derive(Serialize)]
struct SaturationSummary {
    levels: Vec<LevelReport>,
    exponent_range: (f64, f64),
    exponent_stability: f64,
    pass: bool,
}

fn run_saturation(cfg: &RunConfig) -> Result<Outcome> {
    let p: SaturationParams = cfg.params()?;
    ensure!(!p.resolutions.is_empty(), "params.resolutions: need at least one level");
    let report = saturation_experiment(&p.resolutions, &p.alphas)?;
    let mut csv = String::from("resolution,alpha,alpha_used,A,B,method,L\n");
    for level in &report.levels {
        for r in &level.rows {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                level.resolution,
                fmt_f64(r.alpha),
                fmt_f64(r.alpha_used),
                fmt_f64(r.lower),
                fmt_f64(r.upper),
                r.method.as_str(),
                r.samples
            );
        }
    }
    let summary = SaturationSummary {
        levels: report
            .levels
            .iter()
            .map(|l| LevelReport {
                resolution: l.resolution,
                exponent_a: l.exponent_a,
                constant_a: l.constant_a,
                r2: l.r2,
                left_slope: l.left_slope,
                max_ratio_right: l.max_ratio_right,
            })
            .collect(),
        exponent_range: report.exponent_range,
        exponent_stability: report.exponent_stability,
        pass: report.pass,
    };
    let artifacts = vec![Artifact::new("saturation.csv", csv), Artifact::json("report.json", &summary)?];
    outcome(Status::from_check(report.pass), artifacts, &p)
}
