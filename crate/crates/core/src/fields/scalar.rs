use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use super::{same_chart, Chart, Embedding, FieldError, Jet2, Point};

/// A univariate function that supplies its value and first two derivatives.
///
/// This is the hook through which ODE-defined special functions enter fields.
pub trait Univariate: Send + Sync {
    fn name(&self) -> &str;
    fn eval3(&self, x: f64) -> Result<[f64; 3], FieldError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Atan,
}

type CustomFn = dyn Fn(&[f64], u8) -> Result<Jet2, FieldError> + Send + Sync;

enum Node {
    Const(f64),
    Coord(usize),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Neg(ScalarField),
    Powf(ScalarField, f64),
    Powi(ScalarField, i32),
    Elem(Elementary, ScalarField),
    Special(Arc<dyn Univariate>, ScalarField),
    Partial(ScalarField, usize),
    Pullback(ScalarField, Arc<Embedding>),
    Custom(Arc<CustomFn>),
}

/// Chart-to-jet map built as an immutable composition tree.
#[derive(Clone)]
pub struct ScalarField {
    chart: Arc<Chart>,
    node: Arc<Node>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Const(c) => write!(f, "{c}"),
            Node::Coord(i) => write!(f, "{}", self.chart.coord_names[*i]),
            _ => write!(f, "<field on {}>", self.chart.name),
        }
    }
}

impl ScalarField {
    fn wrap(chart: &Arc<Chart>, node: Node) -> Self {
        ScalarField { chart: chart.clone(), node: Arc::new(node) }
    }

    pub fn constant(chart: &Arc<Chart>, c: f64) -> Self {
        Self::wrap(chart, Node::Const(c))
    }

    pub fn coord(chart: &Arc<Chart>, i: usize) -> Self {
        assert!(i < chart.dim(), "coordinate index {i} out of range");
        Self::wrap(chart, Node::Coord(i))
    }

    /// Field defined by an arbitrary evaluator returning a jet with at least the requested order.
    pub fn custom<F>(chart: &Arc<Chart>, f: F) -> Self
    where
        F: Fn(&[f64], u8) -> Result<Jet2, FieldError> + Send + Sync + 'static,
    {
        Self::wrap(chart, Node::Custom(Arc::new(f)))
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn as_const(&self) -> Option<f64> {
        match &*self.node {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    fn check_chart(&self, o: &ScalarField) -> Result<(), FieldError> {
        if same_chart(&self.chart, &o.chart) {
            Ok(())
        } else {
            Err(FieldError::ChartMismatch(self.chart.name.clone(), o.chart.name.clone()))
        }
    }

    pub fn try_add(&self, o: &ScalarField) -> Result<Self, FieldError> {
        self.check_chart(o)?;
        Ok(match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(&self.chart, a + b),
            (Some(a), _) if a == 0.0 => o.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Self::wrap(&self.chart, Node::Add(self.clone(), o.clone())),
        })
    }

    pub fn try_sub(&self, o: &ScalarField) -> Result<Self, FieldError> {
        self.check_chart(o)?;
        Ok(match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(&self.chart, a - b),
            (_, Some(b)) if b == 0.0 => self.clone(),
            (Some(a), _) if a == 0.0 => o.neg_field(),
            _ => Self::wrap(&self.chart, Node::Sub(self.clone(), o.clone())),
        })
    }

    pub fn try_mul(&self, o: &ScalarField) -> Result<Self, FieldError> {
        self.check_chart(o)?;
        Ok(match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(&self.chart, a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => Self::constant(&self.chart, 0.0),
            (Some(a), _) if a == 1.0 => o.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Self::wrap(&self.chart, Node::Mul(self.clone(), o.clone())),
        })
    }

    pub fn try_div(&self, o: &ScalarField) -> Result<Self, FieldError> {
        self.check_chart(o)?;
        Ok(match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Self::constant(&self.chart, a / b),
            (Some(a), _) if a == 0.0 => self.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Self::wrap(&self.chart, Node::Div(self.clone(), o.clone())),
        })
    }

    fn neg_field(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(&self.chart, -c),
            None => Self::wrap(&self.chart, Node::Neg(self.clone())),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self * c
    }

    pub fn powf(&self, p: f64) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(&self.chart, c.powf(p)),
            None if p == 1.0 => self.clone(),
            None => Self::wrap(&self.chart, Node::Powf(self.clone(), p)),
        }
    }

    pub fn powi(&self, k: i32) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(&self.chart, c.powi(k)),
            None if k == 1 => self.clone(),
            None if k == 0 => Self::constant(&self.chart, 1.0),
            None => Self::wrap(&self.chart, Node::Powi(self.clone(), k)),
        }
    }

    pub fn elem(&self, e: Elementary) -> Self {
        Self::wrap(&self.chart, Node::Elem(e, self.clone()))
    }

    pub fn sin(&self) -> Self {
        self.elem(Elementary::Sin)
    }
    pub fn cos(&self) -> Self {
        self.elem(Elementary::Cos)
    }
    pub fn exp(&self) -> Self {
        self.elem(Elementary::Exp)
    }
    pub fn ln(&self) -> Self {
        self.elem(Elementary::Ln)
    }
    pub fn sqrt(&self) -> Self {
        self.elem(Elementary::Sqrt)
    }
    pub fn atan(&self) -> Self {
        self.elem(Elementary::Atan)
    }

    pub fn compose(&self, f: Arc<dyn Univariate>) -> Self {
        Self::wrap(&self.chart, Node::Special(f, self.clone()))
    }

    /// ∂f/∂x_i as a field (one jet order is consumed).
    pub fn partial(&self, i: usize) -> Self {
        if self.as_const().is_some() {
            return Self::constant(&self.chart, 0.0);
        }
        Self::wrap(&self.chart, Node::Partial(self.clone(), i))
    }

    /// Pull back along a coordinate projection onto a bigger chart.
    pub fn pullback(&self, emb: &Arc<Embedding>) -> Result<Self, FieldError> {
        if !same_chart(&self.chart, &emb.source) {
            return Err(FieldError::ChartMismatch(self.chart.name.clone(), emb.source.name.clone()));
        }
        Ok(match &*self.node {
            Node::Const(c) => Self::constant(&emb.target, *c),
            Node::Coord(i) => Self::coord(&emb.target, emb.map[*i]),
            _ => Self::wrap(&emb.target, Node::Pullback(self.clone(), emb.clone())),
        })
    }

    pub fn evaluate(&self, p: &Point) -> Result<Jet2, FieldError> {
        if !same_chart(&self.chart, &p.chart) {
            return Err(FieldError::ChartMismatch(self.chart.name.clone(), p.chart.name.clone()));
        }
        self.eval_at(&p.coords, 2)
    }

    /// Evaluate at raw coordinates, carrying `order` derivative layers (0, 1 or 2).
    pub fn eval_at(&self, x: &[f64], order: u8) -> Result<Jet2, FieldError> {
        let n = self.chart.dim();
        Ok(match &*self.node {
            Node::Const(c) => Jet2::constant(*c),
            Node::Coord(i) => Jet2::variable(x[*i], *i, n, order),
            Node::Add(a, b) => a.eval_at(x, order)? + b.eval_at(x, order)?,
            Node::Sub(a, b) => a.eval_at(x, order)? - b.eval_at(x, order)?,
            Node::Mul(a, b) => {
                let av = a.eval_at(x, order)?;
                if av.is_constant() && av.value == 0.0 {
                    return Ok(Jet2::zero());
                }
                av * b.eval_at(x, order)?
            }
            Node::Div(a, b) => {
                let bv = b.eval_at(x, order)?;
                if bv.value.abs() < 1e-300 {
                    return Err(FieldError::DivisionByZero { point: x.to_vec() });
                }
                a.eval_at(x, order)? / bv
            }
            Node::Neg(a) => -a.eval_at(x, order)?,
            Node::Powf(a, p) => a.eval_at(x, order)?.powf(*p),
            Node::Powi(a, k) => a.eval_at(x, order)?.powi(*k),
            Node::Elem(e, a) => {
                let v = a.eval_at(x, order)?;
                match e {
                    Elementary::Sin => v.sin(),
                    Elementary::Cos => v.cos(),
                    Elementary::Exp => v.exp(),
                    Elementary::Ln => v.ln(),
                    Elementary::Sqrt => v.sqrt(),
                    Elementary::Atan => v.atan(),
                }
            }
            Node::Special(f, a) => {
                let v = a.eval_at(x, order)?;
                v.compose(f.eval3(v.value)?)
            }
            Node::Partial(a, i) => a.eval_at(x, order + 1)?.partial(*i),
            Node::Pullback(a, emb) => {
                let small = emb.restrict(x);
                a.eval_at(&small, order)?.lift(&emb.map, n)
            }
            Node::Custom(f) => f(x, order)?,
        })
    }

    pub fn value_at(&self, x: &[f64]) -> Result<f64, FieldError> {
        Ok(self.eval_at(x, 0)?.value)
    }
}

macro_rules! field_binop {
    ($tr:ident, $m:ident, $try:ident, $op:tt) => {
        impl $tr<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $m(self, o: &ScalarField) -> ScalarField {
                self.$try(o).expect("chart mismatch in field arithmetic")
            }
        }
        impl $tr<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $m(self, o: ScalarField) -> ScalarField {
                &self $op &o
            }
        }
        impl $tr<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $m(self, o: &ScalarField) -> ScalarField {
                &self $op o
            }
        }
        impl $tr<ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $m(self, o: ScalarField) -> ScalarField {
                self $op &o
            }
        }
        impl $tr<f64> for &ScalarField {
            type Output = ScalarField;
            fn $m(self, c: f64) -> ScalarField {
                self $op &ScalarField::constant(&self.chart, c)
            }
        }
        impl $tr<f64> for ScalarField {
            type Output = ScalarField;
            fn $m(self, c: f64) -> ScalarField {
                &self $op c
            }
        }
        impl $tr<&ScalarField> for f64 {
            type Output = ScalarField;
            fn $m(self, o: &ScalarField) -> ScalarField {
                &ScalarField::constant(&o.chart, self) $op o
            }
        }
        impl $tr<ScalarField> for f64 {
            type Output = ScalarField;
            fn $m(self, o: ScalarField) -> ScalarField {
                self $op &o
            }
        }
    };
}
field_binop!(Add, add, try_add, +);
field_binop!(Sub, sub, try_sub, -);
field_binop!(Mul, mul, try_mul, *);
field_binop!(Div, div, try_div, /);

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.neg_field()
    }
}
impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.neg_field()
    }
}
