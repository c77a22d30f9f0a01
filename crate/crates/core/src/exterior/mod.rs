//! Exterior algebra and calculus with jet-valued coefficients.

mod complex;
mod form;
mod metric;
pub mod multi;
mod pointwise;

pub use complex::{dc, AlmostComplex};
pub use form::{DifferentialForm, VectorField};
pub use metric::{MetricField, MetricJet, Orientation};
pub use pointwise::{max_diff_values, JetMatrix, MinorTable, PForm};

use thiserror::Error;

use crate::fields::FieldError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExteriorError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("metric not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },
    #[error("singular matrix")]
    Singular,
    #[error("derivatives of order {needed} unavailable (have {got}) at {point:?}")]
    InsufficientOrder { needed: u8, got: u8, point: Vec<f64> },
    #[error("J² + I residual {residual:e} at {point:?}")]
    NotComplex { residual: f64, point: Vec<f64> },
}
