use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure surfaced by the solvers and verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("domain error in component {component}: {reason} in `{subexpression}`")]
    Domain {
        component: usize,
        subexpression: String,
        reason: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("seed is not on the zero set: residual {residual:e} exceeds {tolerance:e}")]
    SeedNotOnZeroSet { residual: f64, tolerance: f64 },

    #[error("derivative with respect to the dependent variable vanishes at the seed ({value:e})")]
    DegenerateDerivative { value: f64 },

    #[error("no monotonicity box found at level {level} after {attempts} attempts; last failure at {point:?}: {reason}")]
    BoxNotFound {
        level: usize,
        attempts: usize,
        point: Vec<f64>,
        reason: String,
    },

    #[error("point {point:?} lies outside the solution box at level {level}")]
    OutsideBox { level: usize, point: Vec<f64> },

    #[error("bisection did not converge at level {level}: {reason}")]
    NoConvergence { level: usize, reason: String },

    #[error("no sign change found on the grid (min |g| = {min_abs:e})")]
    NoSignChange { min_abs: f64 },

    #[error("Jacobian is degenerate at the seed (det = {det:e})")]
    DegenerateJacobian { det: f64 },

    #[error("radius fell below {floor:e} without passing the injectivity checks")]
    RadiusUnderflow { floor: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}
