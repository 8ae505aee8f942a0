//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size budget exceeded: {what} needs {required} edges, budget is {budget}")]
    CapacityExceeded {
        what: String,
        required: u128,
        budget: u64,
    },

    #[error("graph is disconnected: no path from `{from}` to `{to}`")]
    Disconnected { from: String, to: String },

    #[error("address `{address}` is not in the copy index")]
    UnknownAddress { address: String },

    #[error("sub-copy at `{address}` has level 0: a single edge carries no quadruple")]
    NoQuadrupleAtLevelZero { address: String },

    #[error("({a}, {b}) is not a side pair of the quadruple at `{address}`")]
    NotASidePair {
        address: String,
        a: String,
        b: String,
    },

    #[error("vertex `{id}` has no image coordinates")]
    MissingVertex { id: String },

    #[error("image points for `{a}` and `{b}` coincide")]
    CoincidentImages { a: String, b: String },

    #[error("map violates the quasi-isometry inequalities on ({a}, {b})")]
    NotAQuasiIsometry { a: String, b: String },

    #[error("`{0}` is not a uniformly convex target")]
    NotUniformlyConvex(String),

    #[error("modulus vanishes at epsilon = {epsilon}: required level is unreachable")]
    UnreachableLevel { epsilon: f64 },

    #[error("maximizer did not converge; best bracket [{lo}, {hi}]")]
    NonConvergence { lo: f64, hi: f64 },

    #[error("all {restarts} restarts were abandoned: {reason}")]
    OptimizationFailed { restarts: usize, reason: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("triangle inequality fails on ({a}, {b}, {c})")]
    TriangleViolation { a: String, b: String, c: String },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag for each variant, used by the CLI error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CapacityExceeded { .. } => "capacity_exceeded",
            Error::Disconnected { .. } => "disconnected",
            Error::UnknownAddress { .. } => "unknown_address",
            Error::NoQuadrupleAtLevelZero { .. } => "no_quadruple_at_level_zero",
            Error::NotASidePair { .. } => "not_a_side_pair",
            Error::MissingVertex { .. } => "missing_vertex",
            Error::CoincidentImages { .. } => "coincident_images",
            Error::NotAQuasiIsometry { .. } => "not_a_quasi_isometry",
            Error::NotUniformlyConvex(_) => "not_uniformly_convex",
            Error::UnreachableLevel { .. } => "unreachable_level",
            Error::NonConvergence { .. } => "non_convergence",
            Error::OptimizationFailed { .. } => "optimization_failed",
            Error::Degenerate(_) => "degenerate",
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidMetric(_) => "invalid_metric",
            Error::TriangleViolation { .. } => "triangle_violation",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}
