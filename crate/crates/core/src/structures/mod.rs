//! SU(3), G2, Spin(7) and SU(4) structures: model forms, assembly from
//! reduction data, pointwise invariants and torsion.

mod model;
mod nijenhuis;
mod reduction;
mod residuals;
mod types;


pub use model::{model_g2_form, model_spin7_form, MODEL_SPIN7_TERMS};
pub use nijenhuis::{nijenhuis_norm_at, nijenhuis_residual};
pub use reduction::{
    assemble_g2, assemble_spin7, g2_prescription_check, g2_torsion_tau, spin7_from_g2, spin7_prescription_check,
    su3_torsion, tau_alternative, ReductionData, TorsionReport, TorsionSample,
};
pub use residuals::ResidualReport;
pub use types::{complex_product, g2_metric_from_values, type_residual, G2Structure, SU3Structure, SU4Structure, Spin7Structure};

use thiserror::Error;

use crate::exterior::ExteriorError;
use crate::fields::FieldError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StructureError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("{identity} fails at {point:?}: residual {residual:e}")]
    Invariant { identity: String, point: Vec<f64>, residual: f64 },
    #[error("precondition {name} fails: residual {residual:e}")]
    Precondition { name: String, residual: f64 },
}

impl From<FieldError> for StructureError {
    fn from(e: FieldError) -> Self {
        StructureError::Exterior(e.into())
    }
}
