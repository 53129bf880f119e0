use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("phase-space grid does not cover the numerical support (boundary mass ratio {ratio:.3e})")]
    Coverage { ratio: f64 },
    #[error("operator is not Hermitian (defect {defect:.3e}, scale {scale:.3e})")]
    NotHermitian { defect: f64, scale: f64 },
    #[error("unsupported mixed norm (p={p}, q={q})")]
    UnsupportedNorm { p: String, q: String },
    #[error("no atoms with numerical mass inside the box")]
    EmptyAtomSet,
    #[error("{0}")]
    Parameter(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("sweep failed at alpha={alpha}: {source}")]
    SweepStep {
        alpha: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
