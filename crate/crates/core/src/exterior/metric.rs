use std::sync::Arc;

use super::complex::AlmostComplex;
use super::form::DifferentialForm;
use super::pointwise::JetMatrix;
use super::ExteriorError;
use crate::fields::{same_chart, Chart, Embedding, FieldError, Jet2, ScalarField};

enum MNode {
    Components(Vec<Option<ScalarField>>),
    Quadratic(ScalarField, DifferentialForm, DifferentialForm),
    Hermitian(DifferentialForm, AlmostComplex),
    Sum(Vec<MetricField>),
    Scale(ScalarField, MetricField),
    Pullback(MetricField, Arc<Embedding>),
}

/// Orientation used by the Hodge star: a fixed sign relative to the coordinate
/// volume form, or the pointwise sign of a top-degree form.
#[derive(Clone, Debug)]
pub enum Orientation {
    Fixed(i8),
    Form(DifferentialForm),
}

/// Symmetric 2-tensor field with an orientation for Hodge duality.
///
/// Summands may be degenerate (pulled back from a quotient); positivity is only
/// demanded where a full evaluation (inverse, volume) is requested.
#[derive(Clone)]
pub struct MetricField {
    chart: Arc<Chart>,
    node: Arc<MNode>,
    orientation: Orientation,
}

/// Metric jets at a point together with inverse and volume density.
pub struct MetricJet {
    pub g: JetMatrix,
    pub inverse: JetMatrix,
    pub sqrt_det: Jet2,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<metric on {}, orientation {:?}>", self.chart.name, self.orientation)
    }
}

impl MetricField {
    fn wrap(chart: &Arc<Chart>, node: MNode) -> Self {
        MetricField { chart: chart.clone(), node: Arc::new(node), orientation: Orientation::Fixed(1) }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    pub fn with_orientation(mut self, o: i8) -> Self {
        assert!(o == 1 || o == -1, "orientation must be ±1");
        self.orientation = Orientation::Fixed(o);
        self
    }

    /// Orient by the sign of a top-degree form (e.g. ω³ or Φ∧Φ).
    pub fn oriented_by(mut self, vol: &DifferentialForm) -> Self {
        assert!(vol.degree() == self.chart.dim(), "orientation form must have top degree");
        self.orientation = Orientation::Form(vol.clone());
        self
    }

    pub fn orientation_at(&self, x: &[f64]) -> Result<f64, ExteriorError> {
        match &self.orientation {
            Orientation::Fixed(o) => Ok(*o as f64),
            Orientation::Form(v) => {
                let c = v.eval_at(x, 0)?.get(super::multi::full(self.chart.dim()));
                if c == 0.0 {
                    return Err(ExteriorError::Degree(format!("orientation form vanishes at {x:?}")));
                }
                Ok(c.signum())
            }
        }
    }

    /// Full component matrix (row major, symmetric part is used).
    pub fn from_components(chart: &Arc<Chart>, g: Vec<Option<ScalarField>>) -> Result<Self, ExteriorError> {
        let n = chart.dim();
        if g.len() != n * n {
            return Err(FieldError::DimensionMismatch { expected: n * n, got: g.len() }.into());
        }
        Ok(Self::wrap(chart, MNode::Components(g)))
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        let n = chart.dim();
        Self::diagonal(chart, &vec![ScalarField::constant(chart, 1.0); n])
    }

    pub fn diagonal(chart: &Arc<Chart>, d: &[ScalarField]) -> Self {
        let n = chart.dim();
        let mut g = vec![None; n * n];
        for (i, c) in d.iter().enumerate() {
            g[i * n + i] = Some(c.clone());
        }
        Self::wrap(chart, MNode::Components(g))
    }

    /// coef · a ⊙ b (symmetrized product of 1-forms).
    pub fn product(coef: &ScalarField, a: &DifferentialForm, b: &DifferentialForm) -> Self {
        assert!(a.degree() == 1 && b.degree() == 1, "metric terms need 1-forms");
        Self::wrap(a.chart(), MNode::Quadratic(coef.clone(), a.clone(), b.clone()))
    }

    /// coef · a².
    pub fn square(coef: &ScalarField, a: &DifferentialForm) -> Self {
        Self::product(coef, a, a)
    }

    /// g(X, Y) = ω(X, JY), i.e. g_ij = Σ_k ω_ik M_kj.
    pub fn hermitian(omega: &DifferentialForm, j: &AlmostComplex) -> Self {
        Self::wrap(omega.chart(), MNode::Hermitian(omega.clone(), j.clone()))
    }

    pub fn sum(parts: Vec<MetricField>) -> Self {
        let chart = parts[0].chart.clone();
        assert!(parts.iter().all(|p| same_chart(&p.chart, &chart)), "chart mismatch in metric sum");
        Self::wrap(&chart, MNode::Sum(parts))
    }

    pub fn scale(&self, f: &ScalarField) -> Self {
        let mut m = Self::wrap(&self.chart, MNode::Scale(f.clone(), self.clone()));
        m.orientation = self.orientation.clone();
        m
    }

    pub fn pullback(&self, emb: &Arc<Embedding>) -> Self {
        assert!(same_chart(&self.chart, &emb.source), "metric pullback from wrong chart");
        Self::wrap(&emb.target, MNode::Pullback(self.clone(), emb.clone()))
    }

    pub fn eval_matrix(&self, x: &[f64], order: u8) -> Result<JetMatrix, ExteriorError> {
        let n = self.chart.dim();
        Ok(match &*self.node {
            MNode::Components(g) => {
                let mut m = JetMatrix::zeros(n);
                for (k, c) in g.iter().enumerate() {
                    if let Some(c) = c {
                        m.a[k] = c.eval_at(x, order)?;
                    }
                }
                m.symmetrized()
            }
            MNode::Quadratic(c, a, b) => {
                let cv = c.eval_at(x, order)?;
                let av = a.eval_at(x, order)?;
                let bv = b.eval_at(x, order)?;
                let mut m = JetMatrix::zeros(n);
                for (&ka, va) in &av.terms {
                    let i = ka.trailing_zeros() as usize;
                    for (&kb, vb) in &bv.terms {
                        let j = kb.trailing_zeros() as usize;
                        let t = (&(va * vb) * &cv).scale(0.5);
                        m.a[i * n + j].add_scaled(1.0, &t);
                        m.a[j * n + i].add_scaled(1.0, &t);
                    }
                }
                m
            }
            MNode::Hermitian(w, j) => {
                let wv = w.eval_at(x, order)?;
                let mj = j.eval_at(x, order)?;
                let mut om = JetMatrix::zeros(n);
                for (&k, v) in &wv.terms {
                    let a = k.trailing_zeros() as usize;
                    let b = 31 - k.leading_zeros() as usize;
                    om.a[a * n + b] = v.clone();
                    om.a[b * n + a] = -v;
                }
                om.matmul(&mj).symmetrized()
            }
            MNode::Sum(parts) => {
                let mut m = JetMatrix::zeros(n);
                for p in parts {
                    let pm = p.eval_matrix(x, order)?;
                    for (a, b) in m.a.iter_mut().zip(&pm.a) {
                        a.add_scaled(1.0, b);
                    }
                }
                m
            }
            MNode::Scale(f, g) => {
                let fv = f.eval_at(x, order)?;
                let mut m = g.eval_matrix(x, order)?;
                for e in m.a.iter_mut() {
                    *e = &*e * &fv;
                }
                m
            }
            MNode::Pullback(g, emb) => {
                let small = g.eval_matrix(&emb.restrict(x), order)?;
                let k = small.n;
                let mut m = JetMatrix::zeros(n);
                for i in 0..k {
                    for j in 0..k {
                        m.a[emb.map[i] * n + emb.map[j]] = small.get(i, j).lift(&emb.map, n);
                    }
                }
                m
            }
        })
    }

    /// Metric, inverse and √det, failing if the values are not positive definite.
    pub fn eval_full(&self, x: &[f64], order: u8) -> Result<MetricJet, ExteriorError> {
        let g = self.eval_matrix(x, order)?;
        let got = g.a.iter().map(|e| e.order).min().unwrap_or(u8::MAX);
        if got < order.min(2) {
            return Err(ExteriorError::InsufficientOrder { needed: order, got, point: x.to_vec() });
        }
        if g.cholesky_values().is_none() {
            return Err(ExteriorError::NotPositiveDefinite { point: x.to_vec() });
        }
        let inverse = g.inverse().map_err(|_| ExteriorError::NotPositiveDefinite { point: x.to_vec() })?;
        let sqrt_det = g.det().sqrt();
        Ok(MetricJet { g, inverse, sqrt_det })
    }

    pub fn values_at(&self, x: &[f64]) -> Result<Vec<f64>, ExteriorError> {
        Ok(self.eval_matrix(x, 0)?.values())
    }
}

impl std::ops::Add for MetricField {
    type Output = MetricField;
    fn add(self, o: MetricField) -> MetricField {
        MetricField::sum(vec![self, o])
    }
}
