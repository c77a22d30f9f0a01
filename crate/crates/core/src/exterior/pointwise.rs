//! Forms and matrices evaluated at a single point, with jet coefficients.

use std::collections::{BTreeMap, HashMap};

use super::multi::{bits, full, subsets, wedge_sign};
use super::ExteriorError;
use crate::fields::Jet2;

/// Square matrix of jets, row major.
#[derive(Clone, Debug)]
pub struct JetMatrix {
    pub n: usize,
    pub a: Vec<Jet2>,
}

impl JetMatrix {
    pub fn zeros(n: usize) -> Self {
        JetMatrix { n, a: vec![Jet2::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = Jet2::constant(1.0);
        }
        m
    }

    pub fn from_values(n: usize, v: &[f64]) -> Self {
        JetMatrix { n, a: v.iter().map(|&x| Jet2::constant(x)).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet2 {
        &self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Jet2) {
        self.a[i * self.n + j] = v;
    }

    pub fn values(&self) -> Vec<f64> {
        self.a.iter().map(|j| j.value).collect()
    }

    pub fn matmul(&self, o: &JetMatrix) -> JetMatrix {
        let n = self.n;
        let mut r = JetMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.is_constant() && aik.value == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let bkj = o.get(k, j);
                    if bkj.is_constant() && bkj.value == 0.0 {
                        continue;
                    }
                    let p = aik * bkj;
                    r.a[i * n + j] = &r.a[i * n + j] + &p;
                }
            }
        }
        r
    }

    pub fn transpose(&self) -> JetMatrix {
        let n = self.n;
        let mut r = JetMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                r.a[j * n + i] = self.a[i * n + j].clone();
            }
        }
        r
    }

    pub fn symmetrized(&self) -> JetMatrix {
        let n = self.n;
        let mut r = self.clone();
        for i in 0..n {
            for j in i + 1..n {
                let v = (self.get(i, j) + self.get(j, i)).scale(0.5);
                r.a[i * n + j] = v.clone();
                r.a[j * n + i] = v;
            }
        }
        r
    }

    pub fn max_abs_value(&self) -> f64 {
        self.a.iter().map(|j| j.value.abs()).fold(0.0, f64::max)
    }

    /// Gauss-Jordan inverse, pivoting on values.
    pub fn inverse(&self) -> Result<JetMatrix, ExteriorError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = JetMatrix::identity(n);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a.get(i, c).value.abs().total_cmp(&a.get(j, c).value.abs()))
                .unwrap();
            let scale = a.get(c, c).value.abs().max(a.max_abs_value());
            if a.get(p, c).value.abs() <= 1e-14 * scale.max(1e-300) {
                return Err(ExteriorError::Singular);
            }
            if p != c {
                for j in 0..n {
                    a.a.swap(c * n + j, p * n + j);
                    inv.a.swap(c * n + j, p * n + j);
                }
            }
            let piv = a.get(c, c).recip();
            for j in 0..n {
                a.a[c * n + j] = &a.a[c * n + j] * &piv;
                inv.a[c * n + j] = &inv.a[c * n + j] * &piv;
            }
            for i in 0..n {
                if i == c {
                    continue;
                }
                let f = a.get(i, c).clone();
                if f.is_constant() && f.value == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let t = &f * a.get(c, j);
                    a.a[i * n + j] = &a.a[i * n + j] - &t;
                    let t = &f * inv.get(c, j);
                    inv.a[i * n + j] = &inv.a[i * n + j] - &t;
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by elimination with value pivoting (nonsingular input assumed).
    pub fn det(&self) -> Jet2 {
        let n = self.n;
        let mut a = self.clone();
        let mut det = Jet2::constant(1.0);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| a.get(i, c).value.abs().total_cmp(&a.get(j, c).value.abs()))
                .unwrap();
            if a.get(p, c).value == 0.0 {
                return MinorTable::new(self).minor(full(n), full(n));
            }
            if p != c {
                for j in 0..n {
                    a.a.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a.get(c, c).clone();
            det = &det * &piv;
            let rp = piv.recip();
            for i in c + 1..n {
                let f = a.get(i, c) * &rp;
                if f.is_constant() && f.value == 0.0 {
                    continue;
                }
                for j in c..n {
                    let t = &f * a.get(c, j);
                    a.a[i * n + j] = &a.a[i * n + j] - &t;
                }
            }
        }
        det
    }

    /// Cholesky factor of the values (no jets); None if not positive definite.
    pub fn cholesky_values(&self) -> Option<Vec<f64>> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j).value;
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Some(l)
    }
}

/// Memoized Laplace-expansion minors; exact in jets even at singular values.
pub struct MinorTable<'a> {
    m: &'a JetMatrix,
    memo: HashMap<(u32, u32), Jet2>,
}

impl<'a> MinorTable<'a> {
    pub fn new(m: &'a JetMatrix) -> Self {
        MinorTable { m, memo: HashMap::new() }
    }

    pub fn minor(&mut self, rows: u32, cols: u32) -> Jet2 {
        if rows == 0 {
            return Jet2::constant(1.0);
        }
        if let Some(v) = self.memo.get(&(rows, cols)) {
            return v.clone();
        }
        let r0 = rows.trailing_zeros() as usize;
        let rest = rows & (rows - 1);
        let mut acc = Jet2::zero();
        for (pos, c) in bits(cols).into_iter().enumerate() {
            let e = self.m.get(r0, c);
            if e.is_constant() && e.value == 0.0 {
                continue;
            }
            let sub = self.minor(rest, cols & !(1 << c));
            let t = e * &sub;
            acc.add_scaled(if pos % 2 == 0 { 1.0 } else { -1.0 }, &t);
        }
        self.memo.insert((rows, cols), acc.clone());
        acc
    }
}

/// A form at a point: multi-index mask → jet coefficient.
#[derive(Clone, Debug)]
pub struct PForm {
    pub dim: usize,
    pub degree: usize,
    pub terms: BTreeMap<u32, Jet2>,
}

impl PForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        PForm { dim, degree, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, v: Jet2) -> Self {
        let mut f = Self::zero(dim, 0);
        f.terms.insert(0, v);
        f
    }

    pub fn get(&self, mask: u32) -> f64 {
        self.terms.get(&mask).map_or(0.0, |j| j.value)
    }

    pub fn values(&self) -> BTreeMap<u32, f64> {
        self.terms.iter().map(|(&k, v)| (k, v.value)).collect()
    }

    pub fn accumulate(&mut self, mask: u32, c: f64, v: &Jet2) {
        match self.terms.get_mut(&mask) {
            Some(e) => e.add_scaled(c, v),
            None => {
                self.terms.insert(mask, v.scale(c));
            }
        }
    }

    pub fn add(&self, o: &PForm) -> PForm {
        let mut r = self.clone();
        for (&k, v) in &o.terms {
            r.accumulate(k, 1.0, v);
        }
        r
    }

    pub fn sub(&self, o: &PForm) -> PForm {
        let mut r = self.clone();
        for (&k, v) in &o.terms {
            r.accumulate(k, -1.0, v);
        }
        r
    }

    pub fn scale(&self, f: &Jet2) -> PForm {
        let mut r = PForm::zero(self.dim, self.degree);
        for (&k, v) in &self.terms {
            r.terms.insert(k, v * f);
        }
        r
    }

    pub fn scale_f(&self, c: f64) -> PForm {
        let mut r = PForm::zero(self.dim, self.degree);
        for (&k, v) in &self.terms {
            r.terms.insert(k, v.scale(c));
        }
        r
    }

    pub fn wedge(&self, o: &PForm) -> PForm {
        let mut r = PForm::zero(self.dim, self.degree + o.degree);
        for (&a, va) in &self.terms {
            for (&b, vb) in &o.terms {
                let s = wedge_sign(a, b);
                if s != 0.0 {
                    r.accumulate(a | b, s, &(va * vb));
                }
            }
        }
        r
    }

    /// Exterior derivative along the directions in `dirs` (all directions for d).
    pub fn d_along(&self, dirs: u32) -> PForm {
        let mut r = PForm::zero(self.dim, self.degree + 1);
        for (&a, va) in &self.terms {
            if va.is_constant() {
                continue;
            }
            for i in bits(dirs & !a) {
                let s = wedge_sign(1 << i, a);
                let pv = va.partial(i);
                if pv.is_constant() && pv.value == 0.0 {
                    continue;
                }
                r.accumulate(a | (1 << i), s, &pv);
            }
        }
        r
    }

    pub fn d(&self) -> PForm {
        self.d_along(full(self.dim))
    }

    /// Coefficient-wise ∂_i.
    pub fn partial(&self, i: usize) -> PForm {
        let mut r = PForm::zero(self.dim, self.degree);
        for (&a, va) in &self.terms {
            r.terms.insert(a, va.partial(i));
        }
        r
    }

    pub fn interior(&self, x: &[Jet2]) -> PForm {
        let mut r = PForm::zero(self.dim, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return r;
        }
        for (&a, va) in &self.terms {
            for (pos, i) in bits(a).into_iter().enumerate() {
                let xi = &x[i];
                if xi.is_constant() && xi.value == 0.0 {
                    continue;
                }
                let s = if pos % 2 == 0 { 1.0 } else { -1.0 };
                r.accumulate(a & !(1 << i), s, &(xi * va));
            }
        }
        r
    }

    /// β ↦ β(J·, ..., J·) with J dx_i = Σ_j M_ij dx_j.
    pub fn apply_j(&self, m: &JetMatrix) -> PForm {
        let mut r = PForm::zero(self.dim, self.degree);
        if self.degree == 0 {
            return self.clone();
        }
        let mut table = MinorTable::new(m);
        for (&a, va) in &self.terms {
            for b in subsets(self.dim, self.degree) {
                let det = table.minor(a, b);
                if det.is_constant() && det.value == 0.0 {
                    continue;
                }
                r.accumulate(b, 1.0, &(va * &det));
            }
        }
        r
    }

    /// Hodge star from g, its inverse and √det g, with the given orientation sign.
    pub fn star(&self, ginv: &JetMatrix, sqrt_det: &Jet2, orientation: f64) -> PForm {
        let n = self.dim;
        let k = self.degree;
        let mut raised = PForm::zero(n, k);
        let mut table = MinorTable::new(ginv);
        for i in subsets(n, k) {
            let mut acc = Jet2::zero();
            for (&kk, va) in &self.terms {
                let det = table.minor(i, kk);
                if det.is_constant() && det.value == 0.0 {
                    continue;
                }
                acc.add_scaled(1.0, &(&det * va));
            }
            if !(acc.is_constant() && acc.value == 0.0) {
                raised.terms.insert(i, acc);
            }
        }
        let mut r = PForm::zero(n, n - k);
        let fullm = full(n);
        for (&i, v) in &raised.terms {
            let j = fullm & !i;
            let s = orientation * wedge_sign(i, j);
            r.accumulate(j, s, &(v * sqrt_det));
        }
        r
    }

    /// Remap indices through a coordinate projection into a chart of dimension `n`.
    pub fn lift(&self, map: &[usize], n: usize) -> PForm {
        let mut r = PForm::zero(n, self.degree);
        for (&a, va) in &self.terms {
            let seq: Vec<usize> = bits(a).iter().map(|&i| map[i]).collect();
            let s = super::multi::perm_sign(&seq);
            let m = super::multi::mask_of(&seq);
            r.accumulate(m, s, &va.lift(map, n));
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|v| v.value.abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference |self − o| over the union of supports.
    pub fn max_diff(&self, o: &PForm) -> f64 {
        self.sub(o).max_abs()
    }
}

/// sup_k |a_k − b_k| for value maps.
pub fn max_diff_values(a: &BTreeMap<u32, f64>, b: &BTreeMap<u32, f64>) -> f64 {
    let mut m: f64 = 0.0;
    for (k, v) in a {
        m = m.max((v - b.get(k).copied().unwrap_or(0.0)).abs());
    }
    for (k, v) in b {
        if !a.contains_key(k) {
            m = m.max(v.abs());
        }
    }
    m
}
