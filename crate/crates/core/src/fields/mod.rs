//! Charts, points and second-order automatic differentiation of scalar fields.

mod chart;
mod jet;
mod scalar;

pub use chart::{same_chart, Chart, Embedding, Point};
pub use jet::{pidx, Jet2, EXACT};
pub use scalar::{Elementary, ScalarField, Univariate};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FieldError {
    #[error("coordinate {coord} = {value} outside ({lo}, {hi})")]
    Domain { coord: String, value: f64, lo: f64, hi: f64 },
    #[error("division by |x| < 1e-300 at {point:?}")]
    DivisionByZero { point: Vec<f64> },
    #[error("operands live on different charts ({0} vs {1})")]
    ChartMismatch(String, String),
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{name}: argument {x} outside ({lo}, {hi})")]
    SpecialDomain { name: String, x: f64, lo: f64, hi: f64 },
    #[error("{0}")]
    Other(String),
}

#[cfg(test)]
mod tests;
