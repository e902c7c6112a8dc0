use thiserror::Error;

/// Errors raised by the geometry kernel and the modules built on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("degree overflow: {degree}-form does not exist in dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("exterior derivative of a top-degree ({0}) form")]
    TopDegreeDerivative(usize),

    #[error("interior product of a 0-form")]
    ZeroFormContraction,

    #[error("incompatible frame pairing: {0}")]
    FramePairing(String),

    #[error("operation needs a frame-valued form, got a scalar form")]
    ScalarFrameOperand,

    #[error("expected a {expected}-form, got degree {found}")]
    WrongDegree { expected: usize, found: usize },

    #[error("non-finite coefficient in {0}")]
    NonFinite(String),

    #[error("point {point:?} lies outside the grid extents")]
    OutsideGrid { point: Vec<f64> },

    #[error("curve is not closed (endpoint gap {0:e})")]
    OpenCurve(f64),

    #[error("degenerate integration domain: {0}")]
    Degenerate(String),

    #[error("invalid defect: {0}")]
    InvalidDefect(String),

    #[error("defect core at ({x}, {y}) is closer than {margin} to the grid boundary")]
    CoreOutsideMargin { x: f64, y: f64, margin: f64 },

    #[error("operation requires dimension {expected}, grid has {found}")]
    WrongDimension { expected: &'static str, found: usize },

    #[error("invalid dislocation line {id}: {reason}")]
    InvalidLine { id: u64, reason: String },

    #[error("invalid dynamics parameters: {0}")]
    InvalidParams(String),

    #[error("singular velocity system (determinant {0:e})")]
    SingularSystem(f64),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
