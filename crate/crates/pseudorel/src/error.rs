use pseudorel_core::existence::ExistenceError;
use pseudorel_core::ParamError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("dimension {0} is not supported (use 1 or 3)")]
    UnsupportedDim(u32),
    #[error("grid size {0} must be a power of two and at least 256")]
    BadPointCount(usize),
    #[error("truncation radius {0} must be positive and finite")]
    BadRadius(f64),
    #[error("fields live on different grids")]
    Mismatch,
    #[error("expected {expected} samples, got {got}")]
    Length { expected: usize, got: usize },
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("Lebesgue index q = {0} must be at least 2")]
    QMismatch(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroundStateError {
    #[error("closed form exists only for N = 1, grid has N = {0}")]
    DimMismatch(u32),
    #[error("exponent p = {p} is outside (1, {max}) for N = {dim}")]
    ExponentOutOfRange { p: f64, dim: u32, max: f64 },
    #[error("Petviashvili iteration did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("operator I - p u^(p-1) P_inf^-1 is numerically singular (pivot ratio {pivot_ratio:e})")]
    SingularA { pivot_ratio: f64 },
    #[error("Neumann series diverged after {terms} terms (last term ratio {last_ratio:e}); raise c")]
    NeumannDivergence { terms: usize, last_ratio: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// What stopped the contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionFailure {
    /// The Neumann series for the perturbed inverse did not converge.
    Neumann,
    /// An iterate left the ball of radius δ.
    BallExit,
    /// Steps stopped decreasing.
    StepGrowth,
    /// `max_iter` reached without meeting the step tolerance.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("no contraction at c = {c} ({cause:?}); increase c")]
    NoContraction { c: f64, cause: ContractionFailure },
    #[error("solution residual {residual:e} exceeds the acceptance threshold {threshold:e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },
    #[error("invalid solve configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentityError {
    #[error("dilated support {support} exceeds the target radius {radius}")]
    SupportOverflow { support: f64, radius: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("only {converged} of {requested} light speeds converged; at least 4 are needed")]
    InsufficientLadder { converged: usize, requested: usize },
    #[error("light-speed ladder must be strictly increasing with at least 4 entries")]
    BadLadder,
    #[error("replay mismatch for c = {c}: {field} {original:e} vs {replayed:e}")]
    ReplayMismatch { c: f64, field: &'static str, original: f64, replayed: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    GroundState(#[from] GroundStateError),
}

/// Any failure surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    GroundState(#[from] GroundStateError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("{0}")]
    Existence(ExistenceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl From<ExistenceError> for Error {
    fn from(e: ExistenceError) -> Self {
        Self::Existence(e)
    }
}
