use thiserror::Error;

use crate::Complex;

pub type Result<T> = std::result::Result<T, QdError>;

#[derive(Debug, Error)]
pub enum QdError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate parametrization: z'(t) vanishes at node {node}")]
    DegenerateParametrization { node: usize },

    #[error("self-intersection detected on curve {curve} (segments {seg_a} and {seg_b})")]
    SelfIntersection { curve: usize, seg_a: usize, seg_b: usize },

    #[error("curves {a} and {b} intersect")]
    CurvesIntersect { a: usize, b: usize },

    #[error("orientation error on curve {curve}: {detail}")]
    Orientation { curve: usize, detail: String },

    #[error("nesting error: {0}")]
    Nesting(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("point {point} lies outside the domain")]
    OutsideDomain { point: Complex },

    #[error("point {point} is too close to the boundary (distance {distance:.3e}, required {required:.3e})")]
    TooCloseToBoundary {
        point: Complex,
        distance: f64,
        required: f64,
    },

    #[error("cut construction failed: {0}")]
    Cut(String),

    #[error("linear solve failed: {0}")]
    SingularSystem(String),

    #[error("requested order {order} exceeds the configured cap {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("interpolation nodes coincide: {0}")]
    CoincidentNodes(String),

    #[error("fit infeasible: residual {residual:.3e} above target {target:.3e}")]
    FitInfeasible { residual: f64, target: f64 },

    #[error("Newton iteration failed after {iterations} steps (residual {residual:.3e}): {detail}")]
    NewtonFailed {
        iterations: usize,
        residual: f64,
        detail: String,
    },

    #[error("period residual {residual:.3e} above tolerance {tolerance:.3e}")]
    Periods { residual: f64, tolerance: f64 },

    #[error("univalence certificate failed: {0}")]
    Univalence(String),

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("ill-conditioned system: condition estimate {0:.3e}")]
    IllConditioned(f64),

    #[error("holdout function rejected: {0}")]
    HoldoutRejected(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
