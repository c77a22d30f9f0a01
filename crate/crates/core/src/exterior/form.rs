use std::sync::Arc;

use super::complex::AlmostComplex;
use super::metric::MetricField;
use super::multi::{full, mask_of, perm_sign};
use super::pointwise::PForm;
use super::ExteriorError;
use crate::fields::{same_chart, Chart, Embedding, FieldError, Jet2, Point, ScalarField};

/// Vector field with scalar-field components.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub chart: Arc<Chart>,
    pub components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, components: Vec<ScalarField>) -> Result<Self, ExteriorError> {
        if components.len() != chart.dim() {
            return Err(FieldError::DimensionMismatch { expected: chart.dim(), got: components.len() }.into());
        }
        Ok(VectorField { chart: chart.clone(), components })
    }

    /// ∂/∂x_i.
    pub fn coordinate(chart: &Arc<Chart>, i: usize) -> Self {
        let components = (0..chart.dim()).map(|j| ScalarField::constant(chart, if i == j { 1.0 } else { 0.0 })).collect();
        VectorField { chart: chart.clone(), components }
    }

    pub fn constant(chart: &Arc<Chart>, v: &[f64]) -> Self {
        VectorField { chart: chart.clone(), components: v.iter().map(|&c| ScalarField::constant(chart, c)).collect() }
    }

    pub fn eval_at(&self, x: &[f64], order: u8) -> Result<Vec<Jet2>, ExteriorError> {
        self.components.iter().map(|c| c.eval_at(x, order).map_err(Into::into)).collect()
    }
}

enum FNode {
    Coeffs(Vec<(u32, ScalarField)>),
    Sum(Vec<DifferentialForm>),
    Scale(ScalarField, DifferentialForm),
    Wedge(DifferentialForm, DifferentialForm),
    D(DifferentialForm, u32),
    Interior(VectorField, DifferentialForm),
    Star(DifferentialForm, MetricField),
    ApplyJ(DifferentialForm, AlmostComplex),
    Partial(DifferentialForm, usize),
    Pullback(DifferentialForm, Arc<Embedding>),
    Restrict(DifferentialForm, Arc<Embedding>, Vec<f64>),
}

/// Degree-k form on a chart, an immutable expression tree evaluated pointwise to jets.
#[derive(Clone)]
pub struct DifferentialForm {
    chart: Arc<Chart>,
    degree: usize,
    node: Arc<FNode>,
}

impl std::fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<{}-form on {}>", self.degree, self.chart.name)
    }
}

impl DifferentialForm {
    fn wrap(chart: &Arc<Chart>, degree: usize, node: FNode) -> Self {
        DifferentialForm { chart: chart.clone(), degree, node: Arc::new(node) }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
        Self::wrap(chart, degree, FNode::Coeffs(Vec::new()))
    }

    /// From (index list, coefficient) pairs; indices may be unordered (sign applied) and repeated (dropped).
    pub fn from_terms(chart: &Arc<Chart>, degree: usize, terms: Vec<(Vec<usize>, ScalarField)>) -> Result<Self, ExteriorError> {
        let mut out: Vec<(u32, ScalarField)> = Vec::new();
        for (idx, c) in terms {
            if idx.len() != degree || idx.iter().any(|&i| i >= chart.dim()) {
                return Err(ExteriorError::Degree(format!("multi-index {idx:?} invalid for degree {degree} on {}", chart.name)));
            }
            if !same_chart(chart, c.chart()) {
                return Err(FieldError::ChartMismatch(chart.name.clone(), c.chart().name.clone()).into());
            }
            let s = perm_sign(&idx);
            if s == 0.0 {
                continue;
            }
            let m = mask_of(&idx);
            let c = if s < 0.0 { -c } else { c };
            match out.iter_mut().find(|(k, _)| *k == m) {
                Some((_, e)) => *e = &*e + &c,
                None => out.push((m, c)),
            }
        }
        Ok(Self::wrap(chart, degree, FNode::Coeffs(out)))
    }

    /// dx_{i1} ∧ ... ∧ dx_{ik} with constant coefficient.
    pub fn basis(chart: &Arc<Chart>, idx: &[usize]) -> Self {
        Self::from_terms(chart, idx.len(), vec![(idx.to_vec(), ScalarField::constant(chart, 1.0))]).expect("basis form")
    }

    pub fn dx(chart: &Arc<Chart>, i: usize) -> Self {
        Self::basis(chart, &[i])
    }

    pub fn function(f: &ScalarField) -> Self {
        Self::wrap(f.chart(), 0, FNode::Coeffs(vec![(0, f.clone())]))
    }

    /// 1-form Σ c_i dx_i.
    pub fn one_form(chart: &Arc<Chart>, coeffs: &[(usize, ScalarField)]) -> Self {
        Self::from_terms(chart, 1, coeffs.iter().map(|(i, c)| (vec![*i], c.clone())).collect()).expect("one-form")
    }

    fn check(&self, o: &DifferentialForm) -> Result<(), ExteriorError> {
        if same_chart(&self.chart, &o.chart) {
            Ok(())
        } else {
            Err(FieldError::ChartMismatch(self.chart.name.clone(), o.chart.name.clone()).into())
        }
    }

    pub fn try_add(&self, o: &DifferentialForm) -> Result<Self, ExteriorError> {
        self.check(o)?;
        if self.degree != o.degree {
            return Err(ExteriorError::Degree(format!("cannot add degrees {} and {}", self.degree, o.degree)));
        }
        let mut parts = Vec::new();
        for f in [self, o] {
            match &*f.node {
                FNode::Sum(v) => parts.extend(v.iter().cloned()),
                FNode::Coeffs(v) if v.is_empty() => {}
                _ => parts.push(f.clone()),
            }
        }
        Ok(Self::wrap(&self.chart, self.degree, FNode::Sum(parts)))
    }

    pub fn try_wedge(&self, o: &DifferentialForm) -> Result<Self, ExteriorError> {
        self.check(o)?;
        if self.degree + o.degree > self.chart.dim() {
            return Err(ExteriorError::Degree(format!("wedge of degrees {} and {} exceeds dimension", self.degree, o.degree)));
        }
        Ok(Self::wrap(&self.chart, self.degree + o.degree, FNode::Wedge(self.clone(), o.clone())))
    }

    pub fn wedge(&self, o: &DifferentialForm) -> Self {
        self.try_wedge(o).expect("wedge")
    }

    pub fn scale(&self, f: &ScalarField) -> Self {
        assert!(same_chart(&self.chart, f.chart()), "chart mismatch in form scaling");
        if let Some(c) = f.as_const() {
            if c == 1.0 {
                return self.clone();
            }
        }
        Self::wrap(&self.chart, self.degree, FNode::Scale(f.clone(), self.clone()))
    }

    pub fn scale_c(&self, c: f64) -> Self {
        self.scale(&ScalarField::constant(&self.chart, c))
    }

    pub fn d(&self) -> Self {
        assert!(self.degree < self.chart.dim(), "d of a top-degree form");
        Self::wrap(&self.chart, self.degree + 1, FNode::D(self.clone(), full(self.chart.dim())))
    }

    /// Exterior derivative using only the coordinate directions in `dirs`.
    pub fn d_along(&self, dirs: &[usize]) -> Self {
        Self::wrap(&self.chart, self.degree + 1, FNode::D(self.clone(), mask_of(dirs)))
    }

    /// Coefficient-wise ∂/∂x_i.
    pub fn partial(&self, i: usize) -> Self {
        Self::wrap(&self.chart, self.degree, FNode::Partial(self.clone(), i))
    }

    pub fn interior(&self, x: &VectorField) -> Result<Self, ExteriorError> {
        if !same_chart(&self.chart, &x.chart) {
            return Err(FieldError::ChartMismatch(self.chart.name.clone(), x.chart.name.clone()).into());
        }
        if self.degree == 0 {
            return Err(ExteriorError::Degree("interior product of a function".into()));
        }
        Ok(Self::wrap(&self.chart, self.degree - 1, FNode::Interior(x.clone(), self.clone())))
    }

    pub fn star(&self, g: &MetricField) -> Result<Self, ExteriorError> {
        if !same_chart(&self.chart, g.chart()) {
            return Err(FieldError::ChartMismatch(self.chart.name.clone(), g.chart().name.clone()).into());
        }
        Ok(Self::wrap(&self.chart, self.chart.dim() - self.degree, FNode::Star(self.clone(), g.clone())))
    }

    /// β ↦ β(J·, ..., J·).
    pub fn apply_j(&self, j: &AlmostComplex) -> Self {
        Self::wrap(&self.chart, self.degree, FNode::ApplyJ(self.clone(), j.clone()))
    }

    pub fn pullback(&self, emb: &Arc<Embedding>) -> Result<Self, ExteriorError> {
        if !same_chart(&self.chart, &emb.source) {
            return Err(FieldError::ChartMismatch(self.chart.name.clone(), emb.source.name.clone()).into());
        }
        Ok(Self::wrap(&emb.target, self.degree, FNode::Pullback(self.clone(), emb.clone())))
    }

    /// Restrict a form on `emb.target` to the slice through `fiber` (values for the
    /// target coordinates outside the image), keeping only base directions.
    ///
    /// Used to push basic forms (curvatures of invariant connections) down to a quotient.
    pub fn restrict(&self, emb: &Arc<Embedding>, fiber: Vec<f64>) -> Result<Self, ExteriorError> {
        if !same_chart(&self.chart, &emb.target) {
            return Err(FieldError::ChartMismatch(self.chart.name.clone(), emb.target.name.clone()).into());
        }
        if fiber.len() != emb.target.dim() - emb.source.dim() {
            return Err(FieldError::DimensionMismatch { expected: emb.target.dim() - emb.source.dim(), got: fiber.len() }.into());
        }
        Ok(Self::wrap(&emb.source, self.degree, FNode::Restrict(self.clone(), emb.clone(), fiber)))
    }

    pub fn evaluate(&self, p: &Point) -> Result<PForm, ExteriorError> {
        if !same_chart(&self.chart, &p.chart) {
            return Err(FieldError::ChartMismatch(self.chart.name.clone(), p.chart.name.clone()).into());
        }
        self.eval_at(&p.coords, 2)
    }

    pub fn eval_at(&self, x: &[f64], order: u8) -> Result<PForm, ExteriorError> {
        let n = self.chart.dim();
        Ok(match &*self.node {
            FNode::Coeffs(v) => {
                let mut r = PForm::zero(n, self.degree);
                for (m, c) in v {
                    if c.is_zero() {
                        continue;
                    }
                    r.accumulate(*m, 1.0, &c.eval_at(x, order)?);
                }
                r
            }
            FNode::Sum(v) => {
                let mut r = PForm::zero(n, self.degree);
                for f in v {
                    r = r.add(&f.eval_at(x, order)?);
                }
                r
            }
            FNode::Scale(f, a) => a.eval_at(x, order)?.scale(&f.eval_at(x, order)?),
            FNode::Wedge(a, b) => {
                let av = a.eval_at(x, order)?;
                if av.terms.is_empty() {
                    return Ok(PForm::zero(n, self.degree));
                }
                av.wedge(&b.eval_at(x, order)?)
            }
            FNode::D(a, dirs) => a.eval_at(x, order + 1)?.d_along(*dirs),
            FNode::Partial(a, i) => a.eval_at(x, order + 1)?.partial(*i),
            FNode::Interior(v, a) => a.eval_at(x, order)?.interior(&v.eval_at(x, order)?),
            FNode::Star(a, g) => {
                let av = a.eval_at(x, order)?;
                let gj = g.eval_full(x, order)?;
                av.star(&gj.inverse, &gj.sqrt_det, g.orientation_at(x)?)
            }
            FNode::ApplyJ(a, j) => a.eval_at(x, order)?.apply_j(&j.eval_at(x, order)?),
            FNode::Pullback(a, emb) => {
                let small = emb.restrict(x);
                a.eval_at(&small, order)?.lift(&emb.map, n)
            }
            FNode::Restrict(a, emb, fiber) => {
                let big = emb.lift_point(x, fiber);
                let bf = a.eval_at(&big, order)?;
                let mut r = PForm::zero(n, self.degree);
                for (&m, v) in &bf.terms {
                    if let Some(sm) = emb.restrict_mask(m) {
                        let seq: Vec<usize> = super::multi::bits(sm).iter().map(|&i| emb.map[i]).collect();
                        r.accumulate(sm, perm_sign(&seq), &v.restrict(&emb.map));
                    }
                }
                r
            }
        })
    }

    pub fn values_at(&self, x: &[f64]) -> Result<std::collections::BTreeMap<u32, f64>, ExteriorError> {
        Ok(self.eval_at(x, 0)?.values())
    }
}

macro_rules! form_ops {
    ($tr:ident, $m:ident, $body:expr) => {
        impl std::ops::$tr<&DifferentialForm> for &DifferentialForm {
            type Output = DifferentialForm;
            fn $m(self, o: &DifferentialForm) -> DifferentialForm {
                let f: fn(&DifferentialForm, &DifferentialForm) -> DifferentialForm = $body;
                f(self, o)
            }
        }
        impl std::ops::$tr<DifferentialForm> for DifferentialForm {
            type Output = DifferentialForm;
            fn $m(self, o: DifferentialForm) -> DifferentialForm {
                std::ops::$tr::$m(&self, &o)
            }
        }
        impl std::ops::$tr<&DifferentialForm> for DifferentialForm {
            type Output = DifferentialForm;
            fn $m(self, o: &DifferentialForm) -> DifferentialForm {
                std::ops::$tr::$m(&self, o)
            }
        }
        impl std::ops::$tr<DifferentialForm> for &DifferentialForm {
            type Output = DifferentialForm;
            fn $m(self, o: DifferentialForm) -> DifferentialForm {
                std::ops::$tr::$m(self, &o)
            }
        }
    };
}
form_ops!(Add, add, |a, b| a.try_add(b).expect("form addition"));
form_ops!(Sub, sub, |a, b| a.try_add(&b.scale_c(-1.0)).expect("form subtraction"));
form_ops!(BitXor, bitxor, |a, b| a.wedge(b));

impl std::ops::Neg for &DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        self.scale_c(-1.0)
    }
}
impl std::ops::Neg for DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        self.scale_c(-1.0)
    }
}
impl std::ops::Mul<&DifferentialForm> for &ScalarField {
    type Output = DifferentialForm;
    fn mul(self, a: &DifferentialForm) -> DifferentialForm {
        a.scale(self)
    }
}
impl std::ops::Mul<DifferentialForm> for ScalarField {
    type Output = DifferentialForm;
    fn mul(self, a: DifferentialForm) -> DifferentialForm {
        a.scale(&self)
    }
}
impl std::ops::Mul<DifferentialForm> for &ScalarField {
    type Output = DifferentialForm;
    fn mul(self, a: DifferentialForm) -> DifferentialForm {
        a.scale(self)
    }
}
impl std::ops::Mul<&DifferentialForm> for f64 {
    type Output = DifferentialForm;
    fn mul(self, a: &DifferentialForm) -> DifferentialForm {
        a.scale_c(self)
    }
}
impl std::ops::Mul<DifferentialForm> for f64 {
    type Output = DifferentialForm;
    fn mul(self, a: DifferentialForm) -> DifferentialForm {
        a.scale_c(self)
    }
}
