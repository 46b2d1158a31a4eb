use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {coords:?} lies outside the chart domain ({reason})")]
    OutsideDomain { coords: Vec<f64>, reason: &'static str },

    #[error("chart dimension {dim} exceeds the jet capacity of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field has {found} components, a {kind} on a {dim}-dimensional chart needs {expected}")]
    Shape {
        kind: &'static str,
        dim: usize,
        expected: usize,
        found: usize,
    },

    #[error("numerically degenerate {what} (pivot {pivot:e})")]
    Degenerate { what: &'static str, pivot: f64 },

    #[error("wedge of a {left}-form and a {right}-form exceeds the supported degree 3")]
    DegreeOverflow { left: usize, right: usize },

    #[error("operation {op} is undefined on a {degree}-form")]
    InvalidDegree { op: &'static str, degree: usize },

    #[error("g and J are not compatible: max |g(J.,J.) - g| = {residual:e}")]
    Incompatible { residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
