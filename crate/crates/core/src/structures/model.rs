use std::sync::Arc;

use crate::exterior::{DifferentialForm, ExteriorError};
use crate::fields::{Chart, ScalarField};

/// Flat Spin(7) 4-form on R⁸ (coordinates x0..x7) as signed index quadruples.
pub const MODEL_SPIN7_TERMS: [([usize; 4], f64); 14] = [
    ([0, 1, 2, 3], 1.0),
    ([0, 1, 4, 5], 1.0),
    ([0, 1, 6, 7], 1.0),
    ([0, 2, 4, 6], 1.0),
    ([0, 2, 5, 7], -1.0),
    ([0, 3, 4, 7], -1.0),
    ([0, 3, 5, 6], -1.0),
    ([2, 3, 4, 5], 1.0),
    ([2, 3, 6, 7], 1.0),
    ([4, 5, 6, 7], 1.0),
    ([1, 2, 4, 7], -1.0),
    ([1, 2, 5, 6], -1.0),
    ([1, 3, 4, 6], -1.0),
    ([1, 3, 5, 7], 1.0),
];

pub fn model_spin7_form(chart: &Arc<Chart>) -> Result<DifferentialForm, ExteriorError> {
    if chart.dim() != 8 {
        return Err(crate::fields::FieldError::DimensionMismatch { expected: 8, got: chart.dim() }.into());
    }
    let terms = MODEL_SPIN7_TERMS.iter().map(|(i, c)| (i.to_vec(), ScalarField::constant(chart, *c))).collect();
    DifferentialForm::from_terms(chart, 4, terms)
}

/// ∂_{x0} ⌟ Φ₀, written on R⁷ with coordinates x1..x7 (indices 0..6).
pub fn model_g2_form(chart: &Arc<Chart>) -> Result<DifferentialForm, ExteriorError> {
    if chart.dim() != 7 {
        return Err(crate::fields::FieldError::DimensionMismatch { expected: 7, got: chart.dim() }.into());
    }
    let terms = MODEL_SPIN7_TERMS
        .iter()
        .filter(|(i, _)| i[0] == 0)
        .map(|(i, c)| (i[1..].iter().map(|k| k - 1).collect(), ScalarField::constant(chart, *c)))
        .collect();
    DifferentialForm::from_terms(chart, 3, terms)
}
