use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("degenerate band k={k}: {reason}")]
    DegenerateBand { k: i32, reason: String },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("representation mismatch: expected {expected}")]
    Representation { expected: &'static str },
    #[error("grids differ")]
    GridMismatch,
    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("fixed-point iteration did not contract after {iterations} iterations (last update {last_update:e})")]
    NonContraction { iterations: usize, last_update: f64 },
    #[error("blow-up detected at step {step}")]
    BlowUp { step: usize },
    #[error("quadrature refinement stalled: estimate changed by {change:e} > tol {tol:e}")]
    RefinementStall { change: f64, tol: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("(q, r) outside every regime: no estimate predicted")]
    NoEstimate,
    #[error("fit needs at least {need} usable points, got {got}")]
    FitDegenerate { need: usize, got: usize },
    #[error("band k={k} not resolved by the grid")]
    UnresolvedBand { k: i32 },
    #[error("snapshot format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
