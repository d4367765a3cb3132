use thiserror::Error;

use crate::stabilization::CorrectionTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("algebra must have at least one block")]
    EmptyAlgebra,

    #[error("block {index} has dimension 0")]
    ZeroBlockDimension { index: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("group order {order} exceeds the supported maximum of {max}")]
    GroupTooLarge { order: usize, max: usize },

    #[error("element is singular (smallest singular value {min_singular_value:e})")]
    Singular { min_singular_value: f64 },

    #[error("perturbation of size {eta} makes the value at element {element} singular")]
    PerturbationTooLarge { eta: f64, element: usize },

    #[error("multiplicativity defect {defect:e} exceeds threshold {threshold:e}")]
    DefectAboveThreshold { defect: f64, threshold: f64 },

    #[error("initial defect {defect:e} is outside the admissible regime (threshold {threshold:e})")]
    Inadmissible { defect: f64, threshold: f64 },

    #[error("correction diverged after {} iterations", .trace.iterations)]
    Diverged { trace: Box<CorrectionTrace> },

    #[error("correction did not reach tolerance within {} iterations (last defect {:e})", .trace.iterations, .trace.last_defect())]
    NotConverged { trace: Box<CorrectionTrace> },

    #[error("corrected map is multiplicative but not unital (unit residual {residual:e})")]
    NonUnital { residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("averaged intertwiner is singular (smallest singular value {min_singular_value:e})")]
    IntertwinerSingular { min_singular_value: f64 },

    #[error("conjugator is too far from the identity: |u - 1| = {distance} >= 1/2")]
    ConjugatorTooFar { distance: f64 },

    #[error("lifted representation misses the target by {residual:e} (tolerance {tol:e})")]
    LiftResidual { residual: f64, tol: f64 },

    #[error("no stage of the tower factors the representation within epsilon = {epsilon:e}")]
    StageNotFound { epsilon: f64 },

    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("dimension {dim} is too large for the certified computation (max {max})")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("subspaces are not graphs over each other along the chosen complement")]
    NotGraphComparable,

    #[error("certificate did not reach gap {target:e} within the evaluation budget (gap {gap:e})")]
    CertificateBudget { gap: f64, target: f64 },

    #[error("invalid metric space: {0}")]
    InvalidMetric(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measures live on different base spaces")]
    MismatchedSpaces,

    #[error("invalid combination weights: {0}")]
    InvalidWeights(String),

    #[error("support of size {size} exceeds the exact-transport limit {max}")]
    SupportTooLarge { size: usize, max: usize },
}
