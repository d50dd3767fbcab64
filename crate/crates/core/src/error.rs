use thiserror::Error;

use crate::grid::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("series inversion is singular: polynomial vanishes at the expansion point")]
    SingularInversion,

    #[error("division by the zero polynomial (or a constant) is not defined")]
    ZeroDivisor,

    #[error("coordinate is not a node of axis {axis}")]
    NotAGridNode { axis: usize },

    #[error("point coordinate {value} lies outside axis {axis} range [{lo}, {hi}]")]
    Extrapolation { axis: usize, value: f64, lo: f64, hi: f64 },

    #[error("invalid window on axis {axis}: size {size} for an axis with {len} nodes")]
    InvalidWindow { axis: usize, size: usize, len: usize },

    #[error("linear system of size {size} exceeds the oracle limit {limit}")]
    SystemTooLarge { size: usize, limit: usize },

    #[error("linear system is singular")]
    SingularSystem,

    #[error("invalid Hermite data: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("expression is undefined at {0:?}")]
    Undefined(Vec<f64>),

    #[error("node {node} of axis {axis} is not shared by two patches")]
    NotSharedNode { axis: usize, node: usize },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
