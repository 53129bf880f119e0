//! Numerical time-frequency analysis on a periodic sampled model of `L²(ℝ)`:
//! short-time Fourier and Wigner transforms, weighted modulation-space
//! norms, Weyl quantization, Gabor frame operators and frame bounds, and
//! dilation sweeps of frame bounds.

pub mod deform;
pub mod error;
pub mod fft;
pub mod gabor;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod modspace;
pub mod resample;
pub mod signal;
pub mod tfcore;
pub mod weyl;
pub mod window;
pub mod zak;

pub use error::{Error, Result};
pub use gabor::{AtomSet, FrameBounds};
pub use grid::{GridSpec, PhaseSpaceGrid, TFPoint};
pub use num_complex::Complex64;
pub use signal::{PhaseSpaceFunction, SampledSignal};
pub use weyl::{OperatorMatrix, SpectralEdges};
pub use window::{make_window, Window, WindowKind, WindowSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
