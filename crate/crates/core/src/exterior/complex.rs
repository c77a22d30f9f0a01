use std::sync::Arc;

use super::form::DifferentialForm;
use super::pointwise::JetMatrix;
use super::ExteriorError;
use crate::fields::{same_chart, Chart, FieldError, ScalarField};

enum JNode {
    Matrix(Vec<ScalarField>),
    Coframe { pairs: Vec<(DifferentialForm, DifferentialForm)>, support: Vec<usize> },
}

/// Almost-complex structure on (a coordinate subspace of) a chart.
///
/// One matrix M encodes both actions: J dx_i = Σ_j M_ij dx_j on covectors and
/// (JX)^i = Σ_j M_ij X^j on vectors. Directions outside `support` are sent to 0,
/// so d^c built from a partial J only sees the supported directions.
#[derive(Clone)]
pub struct AlmostComplex {
    chart: Arc<Chart>,
    node: Arc<JNode>,
}

impl std::fmt::Debug for AlmostComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<almost complex structure on {}>", self.chart.name)
    }
}

impl AlmostComplex {
    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn from_matrix(chart: &Arc<Chart>, m: Vec<ScalarField>) -> Result<Self, ExteriorError> {
        let n = chart.dim();
        if m.len() != n * n {
            return Err(FieldError::DimensionMismatch { expected: n * n, got: m.len() }.into());
        }
        Ok(AlmostComplex { chart: chart.clone(), node: Arc::new(JNode::Matrix(m)) })
    }

    /// Constant matrix given row by row.
    pub fn constant(chart: &Arc<Chart>, m: &[f64]) -> Result<Self, ExteriorError> {
        Self::from_matrix(chart, m.iter().map(|&v| ScalarField::constant(chart, v)).collect())
    }

    /// J from a (1,0)-coframe θ_k = a_k + i b_k: J a_k = −b_k, J b_k = a_k.
    ///
    /// The real forms must span the cotangent directions listed in `support`.
    pub fn from_coframe(pairs: Vec<(DifferentialForm, DifferentialForm)>, support: Vec<usize>) -> Result<Self, ExteriorError> {
        let chart = pairs[0].0.chart().clone();
        for (a, b) in &pairs {
            if !same_chart(a.chart(), &chart) || !same_chart(b.chart(), &chart) || a.degree() != 1 || b.degree() != 1 {
                return Err(ExteriorError::Degree("coframe entries must be 1-forms on one chart".into()));
            }
        }
        if 2 * pairs.len() != support.len() {
            return Err(FieldError::DimensionMismatch { expected: support.len(), got: 2 * pairs.len() }.into());
        }
        Ok(AlmostComplex { chart, node: Arc::new(JNode::Coframe { pairs, support }) })
    }

    pub fn eval_at(&self, x: &[f64], order: u8) -> Result<JetMatrix, ExteriorError> {
        let n = self.chart.dim();
        match &*self.node {
            JNode::Matrix(m) => {
                let mut r = JetMatrix::zeros(n);
                for (k, c) in m.iter().enumerate() {
                    if !c.is_zero() {
                        r.a[k] = c.eval_at(x, order)?;
                    }
                }
                Ok(r)
            }
            JNode::Coframe { pairs, support } => {
                let m = support.len();
                let mut e = JetMatrix::zeros(m);
                for (k, (a, b)) in pairs.iter().enumerate() {
                    for (row, f) in [(2 * k, a), (2 * k + 1, b)] {
                        let fv = f.eval_at(x, order)?;
                        for (&mask, v) in &fv.terms {
                            let i = mask.trailing_zeros() as usize;
                            let col = support.iter().position(|&s| s == i).ok_or_else(|| {
                                ExteriorError::Degree(format!("coframe component dx_{i} outside the support"))
                            })?;
                            e.a[row * m + col] = v.clone();
                        }
                    }
                }
                let einv = e.inverse().map_err(|_| ExteriorError::Singular)?;
                let mut jf = JetMatrix::zeros(m);
                for k in 0..pairs.len() {
                    jf.a[(2 * k) * m + 2 * k + 1] = crate::fields::Jet2::constant(-1.0);
                    jf.a[(2 * k + 1) * m + 2 * k] = crate::fields::Jet2::constant(1.0);
                }
                let small = einv.matmul(&jf).matmul(&e);
                let mut r = JetMatrix::zeros(n);
                for i in 0..m {
                    for j in 0..m {
                        r.a[support[i] * n + support[j]] = small.get(i, j).clone();
                    }
                }
                Ok(r)
            }
        }
    }

    /// Directions where J acts (all of them for a full matrix).
    pub fn support_at(&self, x: &[f64]) -> Result<Vec<usize>, ExteriorError> {
        match &*self.node {
            JNode::Coframe { support, .. } => Ok(support.clone()),
            JNode::Matrix(_) => {
                let m = self.eval_at(x, 0)?;
                let n = m.n;
                Ok((0..n).filter(|&i| (0..n).any(|j| m.get(i, j).value != 0.0 || m.get(j, i).value != 0.0)).collect())
            }
        }
    }

    /// max |J² + I| on the supported block.
    pub fn square_residual(&self, x: &[f64]) -> Result<f64, ExteriorError> {
        let m = self.eval_at(x, 0)?;
        let sup = self.support_at(x)?;
        let sq = m.matmul(&m);
        let mut r: f64 = 0.0;
        for &i in &sup {
            for &j in &sup {
                let e = if i == j { 1.0 } else { 0.0 };
                r = r.max((sq.get(i, j).value + e).abs());
            }
        }
        Ok(r)
    }

    pub fn check_at(&self, x: &[f64]) -> Result<(), ExteriorError> {
        let r = self.square_residual(x)?;
        if r > 1e-8 {
            return Err(ExteriorError::NotComplex { residual: r, point: x.to_vec() });
        }
        Ok(())
    }
}

/// d^c a := J(da) with (Jβ)(·) = β(J·).
pub fn dc(a: &DifferentialForm, j: &AlmostComplex) -> Result<DifferentialForm, ExteriorError> {
    if a.degree() > 1 {
        return Err(ExteriorError::Degree("d^c is defined here for functions and 1-forms".into()));
    }
    Ok(a.d().apply_j(j))
}
