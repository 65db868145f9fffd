use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("separation undefined: need at least 2 points, got {0}")]
    SeparationUndefined(usize),

    #[error("empty point set")]
    EmptyPointSet,

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("window exceeds analysis box: 2r = {two_r} > shortest side {side}")]
    WindowExceedsBox { two_r: f64, side: f64 },

    #[error("densify infeasible: sep_min {sep_min} > target_gap {target_gap}")]
    DensifyInfeasible { sep_min: f64, target_gap: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("grid mismatch: operands are sampled on different grids")]
    GridMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigen-solver did not converge (dim {dim}, max_iter {max_iter})")]
    EigenNonConvergence { dim: usize, max_iter: usize },

    #[error("iteration did not converge after {iterations} steps (best residual {best_residual:e})")]
    NonConvergence { iterations: usize, best_residual: f64 },

    #[error("not in span: residual {residual:e} stalled above tolerance {tol:e}")]
    NotInSpan { residual: f64, tol: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("division by near-zero multiplier (ess_inf = {0:e})")]
    NearZeroMultiplier(f64),

    #[error("zero multiplier: support of the multiplier is empty")]
    ZeroMultiplier,

    #[error("not a bump generator: value {value} at node {omega} inside E (expected 1)")]
    NotBumpGenerator { omega: f64, value: f64 },

    #[error("transition bands overlap: gap {gap} between intervals is <= 2*delta = {two_delta}; merge the intervals or use a smaller delta")]
    BandsOverlap { gap: f64, two_delta: f64 },

    #[error("grid too coarse: {nodes_per_band:.1} nodes per transition band, need >= {required}")]
    UnresolvedTransition { nodes_per_band: f64, required: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
