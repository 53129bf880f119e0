//! Run configuration: the versioned JSON document read by every command,
//! and the per-command parameter blocks.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gabor_core::deform::SweepMethod;
use gabor_core::gabor::AtomSet;
use gabor_core::io::{atoms_from_csv, signal_from_csv};
use gabor_core::modspace::{Decay, EnvelopeDesign, MixedNormParams, TruncationRegion};
use gabor_core::signal::random_smooth;
use gabor_core::{make_window, GridSpec, PhaseSpaceGrid, SampledSignal, WindowKind, WindowSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Stft,
    Wigner,
    Modnorm,
    Framebounds,
    Sweep,
    Tradeoff,
    Saturation,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Stft => "stft",
            Command::Wigner => "wigner",
            Command::Modnorm => "modnorm",
            Command::Framebounds => "framebounds",
            Command::Sweep => "sweep",
            Command::Tradeoff => "tradeoff",
            Command::Saturation => "saturation",
            Command::Verify => "verify",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// Signal CSV (`index,t,re,im`) sampled on the command's grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<PathBuf>,
    /// Node set CSV (`x,omega`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub command: Command,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    /// Parses and validates the top level of a config document. Relative
    /// input paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text).context("config does not match the schema")?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!("schema_version: expected {SCHEMA_VERSION}, found {}", cfg.schema_version);
        }
        if !cfg.params.is_object() {
            bail!("params: expected an object");
        }
        for path in [&mut cfg.inputs.signal, &mut cfg.inputs.atoms].into_iter().flatten() {
            if path.is_relative() {
                *path = base_dir.join(&*path);
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// The command-specific parameter block, with unknown fields rejected.
    pub fn params<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.params.clone()).context("params do not match the schema")
    }
}

/// Centered signal grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub num_samples: usize,
    pub dt: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self { num_samples: 1024, dt: 1.0 / 32.0 }
    }
}

impl GridParams {
    pub fn build(&self) -> Result<GridSpec> {
        GridSpec::centered(self.num_samples, self.dt).context("grid")
    }
}

/// Square phase-space grid `n × n` over `[-half_width, half_width)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsGridParams {
    pub n: usize,
    pub half_width: f64,
}

impl Default for PsGridParams {
    fn default() -> Self {
        Self { n: 256, half_width: 8.0 }
    }
}

impl PsGridParams {
    pub fn build(&self) -> Result<PhaseSpaceGrid> {
        PhaseSpaceGrid::square(self.n, self.half_width).context("psgrid")
    }
}

/// A generated test signal; the seed comes from the run config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    Window { window: WindowSpec },
    RandomSmooth { count: usize, radius: f64 },
    Envelope { decay_x: Decay, decay_omega: Decay, node_step: f64, taper_start: f64, taper_width: f64 },
}

impl Default for SignalSpec {
    fn default() -> Self {
        SignalSpec::Window { window: WindowSpec::Gaussian }
    }
}

impl SignalSpec {
    pub fn build(&self, grid: GridSpec, seed: u64) -> Result<SampledSignal> {
        let signal = match self {
            SignalSpec::Window { window } => make_window(&WindowKind::Analytic(window.clone()), grid)?,
            SignalSpec::RandomSmooth { count, radius } => random_smooth(grid, *count, *radius, seed)?,
            SignalSpec::Envelope { decay_x, decay_omega, node_step, taper_start, taper_width } => EnvelopeDesign {
                decay_x: *decay_x,
                decay_omega: *decay_omega,
                node_step: *node_step,
                taper_start: *taper_start,
                taper_width: *taper_width,
                seed,
            }
            .synthesize(grid)?,
        };
        Ok(signal)
    }
}

/// Resolves a signal from `inputs.signal` or a generator in `params`;
/// giving both is an error.
pub fn resolve_signal(
    cfg: &RunConfig,
    spec: Option<&SignalSpec>,
    grid: GridSpec,
    default: SignalSpec,
) -> Result<SampledSignal> {
    match (&cfg.inputs.signal, spec) {
        (Some(_), Some(_)) => bail!("params.signal: not allowed together with inputs.signal"),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            signal_from_csv(&text, grid).with_context(|| format!("inputs.signal {}", path.display()))
        }
        (None, Some(spec)) => spec.build(grid, cfg.seed),
        (None, None) => default.build(grid, cfg.seed),
    }
}

/// A generated node set; the seed comes from the run config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AtomsSpec {
    /// `n × n` patch of `step·ℤ²`; with `periodic`, one period of the
    /// lattice on the torus of side `n·step`.
    Lattice {
        step: f64,
        n: usize,
        #[serde(default)]
        periodic: bool,
    },
    /// Jittered lattice: offsets in `[0, amplitude)`, or `±amplitude` with
    /// wrapping when `periodic`.
    Jittered {
        step: f64,
        n: usize,
        amplitude: f64,
        #[serde(default)]
        periodic: bool,
    },
    RandomSeparated { count: usize, min_dist: f64, half_width: f64 },
}

impl AtomsSpec {
    pub fn build(&self, seed: u64) -> Result<AtomSet> {
        let set = match *self {
            AtomsSpec::Lattice { step, n, periodic: false } => AtomSet::lattice_patch(step, n),
            AtomsSpec::Lattice { step, n, periodic: true } => AtomSet::periodic_lattice(step, n)?,
            AtomsSpec::Jittered { step, n, amplitude, periodic: false } => {
                AtomSet::jittered_grid(step, n, amplitude, seed)
            }
            AtomsSpec::Jittered { step, n, amplitude, periodic: true } => {
                AtomSet::periodic_jittered(step, n, amplitude, seed)?
            }
            AtomsSpec::RandomSeparated { count, min_dist, half_width } => {
                AtomSet::random_separated(count, min_dist, half_width, seed)?
            }
        };
        Ok(set)
    }
}

pub fn resolve_atoms(cfg: &RunConfig, spec: Option<&AtomsSpec>) -> Result<AtomSet> {
    match (&cfg.inputs.atoms, spec) {
        (Some(_), Some(_)) => bail!("params.atoms: not allowed together with inputs.atoms"),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            atoms_from_csv(&text).with_context(|| format!("inputs.atoms {}", path.display()))
        }
        (None, Some(spec)) => spec.build(cfg.seed),
        (None, None) => bail!("params.atoms: missing (or give inputs.atoms)"),
    }
}

fn default_window() -> WindowSpec {
    WindowSpec::Gaussian
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftParams {
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub psgrid: PsGridParams,
    #[serde(default)]
    pub signal: Option<SignalSpec>,
    #[serde(default = "default_window")]
    pub window: WindowSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerParams {
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub psgrid: PsGridParams,
    #[serde(default)]
    pub signal: Option<SignalSpec>,
    /// Second argument of the cross-Wigner distribution; the signal itself
    /// when absent.
    #[serde(default)]
    pub second: Option<SignalSpec>,
}

/// What a `modnorm` run measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormTarget {
    /// The signal, through its Gaussian STFT.
    #[default]
    Signal,
    /// The Wigner distribution of the signal, as a phase-space symbol.
    Wigner,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModnormParams {
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub psgrid: PsGridParams,
    #[serde(default)]
    pub signal: Option<SignalSpec>,
    pub norm: MixedNormParams,
    #[serde(default)]
    pub target: NormTarget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundsRoute {
    /// Exact periodic system on the dilated torus (node set needs a box).
    Periodized,
    /// Direct sum over the nodes on a finite signal grid.
    Truncated {
        #[serde(default)]
        grid: GridParams,
    },
    /// Fiber-matrix oracle on the square lattice `(num/den)ℤ²`.
    Zak { num: u64, den: u64, resolution: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameboundsParams {
    #[serde(default = "default_window")]
    pub window: WindowSpec,
    #[serde(default)]
    pub atoms: Option<AtomsSpec>,
    /// Dilation applied to the node set (periodized route only).
    #[serde(default = "one")]
    pub alpha: f64,
    /// Defaults to `periodized` for node sets with a box, else `truncated`.
    #[serde(default)]
    pub route: Option<BoundsRoute>,
}

fn one() -> f64 {
    1.0
}

fn default_zak_resolution() -> usize {
    32
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    pub window: WindowSpec,
    #[serde(default)]
    pub atoms: Option<AtomsSpec>,
    pub alphas: Vec<f64>,
    pub method: SweepMethod,
    pub s_class: f64,
    #[serde(default = "default_zak_resolution")]
    pub zak_resolution: usize,
    /// Grid on which the window is sampled for its `M^1_s` norm.
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub psgrid: PsGridParams,
}

fn default_tradeoff_grid() -> GridParams {
    GridParams { num_samples: 16384, dt: 1.0 / 128.0 }
}

fn default_tradeoff_psgrid() -> PsGridParams {
    PsGridParams { n: 512, half_width: 64.0 }
}

fn default_weights() -> (f64, f64, f64) {
    (0.0, 1.0, 2.0)
}

fn default_epsilons() -> Vec<f64> {
    (1..=5).map(|k| 0.5f64.powi(k)).collect()
}

fn default_regions() -> Vec<TruncationRegion> {
    vec![TruncationRegion::FrequencyBand, TruncationRegion::PhaseSpaceBall]
}

/// Power-law STFT envelope `(1+|ω|)^{-2.5}` localized at `x = 0`.
pub fn default_tradeoff_signal() -> SignalSpec {
    SignalSpec::Envelope {
        decay_x: Decay::Localized,
        decay_omega: Decay::PowerLaw { exponent: 2.5 },
        node_step: 1.5,
        taper_start: 40.0,
        taper_width: 4.0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TradeoffParams {
    #[serde(default = "default_tradeoff_grid")]
    pub grid: GridParams,
    #[serde(default = "default_tradeoff_psgrid")]
    pub psgrid: PsGridParams,
    #[serde(default)]
    pub signal: Option<SignalSpec>,
    /// Weights `(a, b, c)` with `a ≤ b ≤ c`.
    #[serde(default = "default_weights")]
    pub weights: (f64, f64, f64),
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_regions")]
    pub regions: Vec<TruncationRegion>,
}

fn default_resolutions() -> Vec<usize> {
    vec![16, 32, 64]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationParams {
    #[serde(default = "default_resolutions")]
    pub resolutions: Vec<usize>,
    #[serde(default = "gabor_core::deform::saturation_alphas")]
    pub alphas: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {}
