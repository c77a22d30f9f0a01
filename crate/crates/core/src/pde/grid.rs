use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::PdeError;

/// Samples of a function on a uniform grid, row-major (last axis fastest). Point
/// `idx` sits at coordinates `idx[k] * spacings[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub shape: Vec<usize>,
    pub spacings: Vec<f64>,
    pub periodic: Vec<bool>,
    pub values: Vec<f64>,
    /// Value of the evolution parameter at which the samples are taken.
    pub time_label: f64,
}

impl GridField {
    pub fn new(shape: Vec<usize>, spacings: Vec<f64>, periodic: Vec<bool>, values: Vec<f64>, time_label: f64) -> Result<Self, PdeError> {
        let g = GridField { shape, spacings, periodic, values, time_label };
        g.validate()?;
        Ok(g)
    }

    /// Periodic grid with `f` sampled at the grid coordinates.
    pub fn periodic_from_fn(shape: &[usize], spacings: &[f64], time_label: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self, PdeError> {
        let n: usize = shape.iter().product();
        let mut values = Vec::with_capacity(n);
        let mut g = GridField { shape: shape.to_vec(), spacings: spacings.to_vec(), periodic: vec![true; shape.len()], values: vec![], time_label };
        for k in 0..n {
            values.push(f(&g.coords(k)));
        }
        g.values = values;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        let d = self.shape.len();
        if d == 0 || self.spacings.len() != d || self.periodic.len() != d {
            return Err(PdeError::Grid("shape, spacings and periodic flags must have one entry per axis".into()));
        }
        if self.shape.contains(&0) {
            return Err(PdeError::Grid("empty axis".into()));
        }
        if self.spacings.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(PdeError::Grid("spacings must be positive".into()));
        }
        if self.values.len() != self.shape.iter().product::<usize>() {
            return Err(PdeError::Grid(format!("{} values for shape {:?}", self.values.len(), self.shape)));
        }
        if let Some(k) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(PdeError::Grid(format!("non-finite value at flat index {k}")));
        }
        if !self.time_label.is_finite() {
            return Err(PdeError::Grid("non-finite time label".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn same_layout(&self, o: &GridField) -> bool {
        self.shape == o.shape && self.spacings == o.spacings && self.periodic == o.periodic
    }

    /// Strides of the row-major layout.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for k in (0..self.dim().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.shape[k + 1];
        }
        s
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.shape[k];
            flat /= self.shape[k];
        }
        idx
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat).iter().zip(&self.spacings).map(|(&i, h)| i as f64 * h).collect()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    pub fn max_abs_diff(&self, o: &GridField) -> f64 {
        self.values.iter().zip(&o.values).fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn with_values(&self, values: Vec<f64>, time_label: f64) -> GridField {
        GridField { values, time_label, ..self.clone() }
    }

    /// CSV dump: `#` header lines with the grid metadata, then one value per line in
    /// row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let join = |v: Vec<String>| v.join(",");
        let _ = writeln!(out, "# shape,{}", join(self.shape.iter().map(|x| x.to_string()).collect()));
        let _ = writeln!(out, "# spacings,{}", join(self.spacings.iter().map(|x| format!("{x:e}")).collect()));
        let _ = writeln!(out, "# periodic,{}", join(self.periodic.iter().map(|x| x.to_string()).collect()));
        let _ = writeln!(out, "# time_label,{:e}", self.time_label);
        let _ = writeln!(out, "{}", join((0..self.dim()).map(|k| format!("i{k}")).chain(["value".into()]).collect()));
        for (k, v) in self.values.iter().enumerate() {
            let idx = self.unravel(k);
            let _ = writeln!(out, "{},{v:e}", join(idx.iter().map(|i| i.to_string()).collect()));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<GridField, PdeError> {
        let mut meta: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut values = Vec::new();
        let bad = |m: &str| PdeError::Grid(format!("csv: {m}"));
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(h) = line.strip_prefix('#') {
                let mut parts = h.trim().split(',');
                if let Some(key) = parts.next() {
                    meta.insert(key, parts.collect());
                }
            } else if line.starts_with('i') {
                continue;
            } else {
                let last = line.rsplit(',').next().ok_or_else(|| bad("empty row"))?;
                values.push(last.trim().parse::<f64>().map_err(|_| bad(line))?);
            }
        }
        let field = |k: &str| meta.get(k).ok_or_else(|| bad(&format!("missing header `{k}`")));
        let shape = field("shape")?.iter().map(|x| x.parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad("shape"))?;
        let spacings = field("spacings")?.iter().map(|x| x.parse::<f64>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad("spacings"))?;
        let periodic = field("periodic")?.iter().map(|x| x.parse::<bool>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad("periodic"))?;
        let time_label = field("time_label")?.first().and_then(|x| x.parse::<f64>().ok()).ok_or_else(|| bad("time_label"))?;
        GridField::new(shape, spacings, periodic, values, time_label)
    }
}

/// Centered second differences on a periodic grid. Axes of length one carry no
/// variation, so their differences vanish.
pub(crate) struct Stencil {
    shape: Vec<usize>,
    strides: Vec<usize>,
    inv_h: Vec<f64>,
}

impl Stencil {
    pub fn new(g: &GridField) -> Result<Self, PdeError> {
        if g.periodic.iter().any(|p| !p) {
            return Err(PdeError::Grid("evolvers need periodic axes".into()));
        }
        Ok(Stencil { shape: g.shape.clone(), strides: g.strides(), inv_h: g.spacings.iter().map(|h| 1.0 / h).collect() })
    }

    fn shift(&self, flat: usize, axis: usize, by: isize) -> usize {
        let n = self.shape[axis];
        let i = (flat / self.strides[axis]) % n;
        let j = (i as isize + by).rem_euclid(n as isize) as usize;
        flat + j * self.strides[axis] - i * self.strides[axis]
    }

    /// ∂²f/∂x_a∂x_b at `flat`.
    pub fn second(&self, v: &[f64], flat: usize, a: usize, b: usize) -> f64 {
        if self.shape[a] == 1 || self.shape[b] == 1 {
            return 0.0;
        }
        if a == b {
            let (p, m) = (self.shift(flat, a, 1), self.shift(flat, a, -1));
            return (v[p] - 2.0 * v[flat] + v[m]) * self.inv_h[a] * self.inv_h[a];
        }
        let ap = self.shift(flat, a, 1);
        let am = self.shift(flat, a, -1);
        let pp = v[self.shift(ap, b, 1)];
        let pm = v[self.shift(ap, b, -1)];
        let mp = v[self.shift(am, b, 1)];
        let mm = v[self.shift(am, b, -1)];
        (pp - pm - mp + mm) * 0.25 * self.inv_h[a] * self.inv_h[b]
    }

    /// Smallest spacing over axes that carry variation.
    pub fn min_spacing(&self) -> Option<f64> {
        self.shape.iter().zip(&self.inv_h).filter(|(n, _)| **n > 1).map(|(_, ih)| 1.0 / ih).reduce(f64::min)
    }
}

/// Outcome of an evolution run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub schema_version: u32,
    pub steps: usize,
    pub dt: f64,
    /// Staggered check of the equation, one entry per interior step.
    pub max_residual_per_step: Vec<f64>,
    pub conserved_diagnostics: BTreeMap<String, f64>,
    #[serde(rename = "final")]
    pub final_field: GridField,
    /// Derivative of the evolved field in the evolution parameter at the end.
    pub final_rate: GridField,
}

pub(crate) const REPORT_SCHEMA: u32 = 1;

/// Classical RK4 for (f, ḟ)'' = rhs(t, f) on flat arrays; `rhs` writes into its output.
pub(crate) fn rk4_step(t: f64, dt: f64, f: &[f64], r: &[f64], rhs: &dyn Fn(f64, &[f64], &mut [f64]) -> Result<(), PdeError>) -> Result<(Vec<f64>, Vec<f64>), PdeError> {
    let n = f.len();
    let axpy = |a: &[f64], c: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + c * y).collect() };
    let mut a1 = vec![0.0; n];
    rhs(t, f, &mut a1)?;
    let f2 = axpy(f, 0.5 * dt, r);
    let r2 = axpy(r, 0.5 * dt, &a1);
    let mut a2 = vec![0.0; n];
    rhs(t + 0.5 * dt, &f2, &mut a2)?;
    let f3 = axpy(f, 0.5 * dt, &r2);
    let r3 = axpy(r, 0.5 * dt, &a2);
    let mut a3 = vec![0.0; n];
    rhs(t + 0.5 * dt, &f3, &mut a3)?;
    let f4 = axpy(f, dt, &r3);
    let r4 = axpy(r, dt, &a3);
    let mut a4 = vec![0.0; n];
    rhs(t + dt, &f4, &mut a4)?;
    let mut fo = Vec::with_capacity(n);
    let mut ro = Vec::with_capacity(n);
    for k in 0..n {
        fo.push(f[k] + dt / 6.0 * (r[k] + 2.0 * r2[k] + 2.0 * r3[k] + r4[k]));
        ro.push(r[k] + dt / 6.0 * (a1[k] + 2.0 * a2[k] + 2.0 * a3[k] + a4[k]));
    }
    Ok((fo, ro))
}
