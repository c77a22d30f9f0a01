//! Order-2 jets: value, gradient and packed symmetric Hessian.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Marker order for jets whose derivatives are exactly zero (constants).
pub const EXACT: u8 = u8::MAX;

/// Taylor data of order ≤ 2 at a point.
///
/// `order` records how many derivative layers are trustworthy. Operations take
/// the minimum order of their operands and differentiation lowers it by one,
/// so asking for a Hessian that was never computed is caught instead of
/// silently returning zeros.
///
/// Empty `grad`/`hess` vectors mean zero, which keeps constants allocation free.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Upper triangle, row major: (0,0),(0,1)..(0,n-1),(1,1),...
    pub hess: Vec<f64>,
    pub order: u8,
}

/// Position of (i, j) in the packed upper triangle of an n×n matrix.
#[inline]
pub fn pidx(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Jet2 { value, grad: Vec::new(), hess: Vec::new(), order: EXACT }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Coordinate projection x_i on an n-dimensional chart, carrying `order` layers.
    /// Only two derivative layers are stored, so requests above 2 are capped and
    /// the cap propagates through `partial` as an honest lower order.
    pub fn variable(value: f64, i: usize, n: usize, order: u8) -> Self {
        let order = order.min(2);
        let grad = if order >= 1 {
            let mut g = vec![0.0; n];
            g[i] = 1.0;
            g
        } else {
            Vec::new()
        };
        Jet2 { value, grad, hess: Vec::new(), order }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn is_constant(&self) -> bool {
        self.grad.is_empty() && self.hess.is_empty()
    }

    pub fn d(&self, i: usize) -> f64 {
        self.grad.get(i).copied().unwrap_or(0.0)
    }

    pub fn dd(&self, i: usize, j: usize) -> f64 {
        if self.hess.is_empty() {
            return 0.0;
        }
        self.hess[pidx(self.grad.len(), i, j)]
    }

    /// Full gradient of length n (zeros for constants).
    pub fn gradient(&self, n: usize) -> Vec<f64> {
        if self.grad.is_empty() {
            vec![0.0; n]
        } else {
            self.grad.clone()
        }
    }

    /// Full symmetric Hessian, n×n row major.
    pub fn hessian(&self, n: usize) -> Vec<f64> {
        let mut h = vec![0.0; n * n];
        if !self.hess.is_empty() {
            for i in 0..n {
                for j in i..n {
                    let v = self.hess[pidx(n, i, j)];
                    h[i * n + j] = v;
                    h[j * n + i] = v;
                }
            }
        }
        h
    }

    /// ∂_i as a jet one order lower.
    pub fn partial(&self, i: usize) -> Jet2 {
        let order = if self.order == EXACT { EXACT } else { self.order.saturating_sub(1) };
        let n = self.grad.len();
        if n == 0 {
            return Jet2 { value: 0.0, grad: Vec::new(), hess: Vec::new(), order };
        }
        let grad = if order >= 1 && !self.hess.is_empty() {
            (0..n).map(|j| self.hess[pidx(n, i, j)]).collect()
        } else {
            Vec::new()
        };
        Jet2 { value: self.grad[i], grad, hess: Vec::new(), order }
    }

    fn dim2(a: &Jet2, b: &Jet2) -> usize {
        a.grad.len().max(b.grad.len())
    }

    fn min_order(a: &Jet2, b: &Jet2) -> u8 {
        a.order.min(b.order)
    }

    pub fn scale(&self, c: f64) -> Jet2 {
        Jet2 {
            value: self.value * c,
            grad: self.grad.iter().map(|g| g * c).collect(),
            hess: self.hess.iter().map(|h| h * c).collect(),
            order: self.order,
        }
    }

    pub fn add_scaled(&mut self, c: f64, o: &Jet2) {
        self.value += c * o.value;
        self.order = self.order.min(o.order);
        if !o.grad.is_empty() {
            if self.grad.is_empty() {
                self.grad = vec![0.0; o.grad.len()];
            }
            for (a, b) in self.grad.iter_mut().zip(&o.grad) {
                *a += c * b;
            }
        }
        if !o.hess.is_empty() {
            if self.hess.is_empty() {
                self.hess = vec![0.0; o.hess.len()];
            }
            for (a, b) in self.hess.iter_mut().zip(&o.hess) {
                *a += c * b;
            }
        }
    }

    fn lin(a: &Jet2, ca: f64, b: &Jet2, cb: f64) -> Jet2 {
        let mut r = a.scale(ca);
        r.add_scaled(cb, b);
        r
    }

    /// Composition with a univariate function given (f, f', f'') at the value.
    pub fn compose(&self, f: [f64; 3]) -> Jet2 {
        let n = self.grad.len();
        let order = self.order;
        let grad: Vec<f64> = if order >= 1 { self.grad.iter().map(|g| f[1] * g).collect() } else { Vec::new() };
        let hess = if order >= 2 && n > 0 {
            let mut h = vec![0.0; n * (n + 1) / 2];
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    let base = if self.hess.is_empty() { 0.0 } else { self.hess[k] };
                    h[k] = f[1] * base + f[2] * self.grad[i] * self.grad[j];
                    k += 1;
                }
            }
            h
        } else {
            Vec::new()
        };
        Jet2 { value: f[0], grad, hess, order }
    }

    pub fn mul_jet(&self, o: &Jet2) -> Jet2 {
        if self.is_constant() {
            let mut r = o.scale(self.value);
            r.order = r.order.min(self.order);
            return r;
        }
        if o.is_constant() {
            let mut r = self.scale(o.value);
            r.order = r.order.min(o.order);
            return r;
        }
        let n = Self::dim2(self, o);
        let order = Self::min_order(self, o);
        let (a, b) = (self, o);
        let grad: Vec<f64> = if order >= 1 {
            (0..n).map(|i| a.d(i) * b.value + a.value * b.d(i)).collect()
        } else {
            Vec::new()
        };
        let hess = if order >= 2 {
            let mut h = vec![0.0; n * (n + 1) / 2];
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    let ah = if a.hess.is_empty() { 0.0 } else { a.hess[k] };
                    let bh = if b.hess.is_empty() { 0.0 } else { b.hess[k] };
                    h[k] = ah * b.value + a.value * bh + a.d(i) * b.d(j) + a.d(j) * b.d(i);
                    k += 1;
                }
            }
            h
        } else {
            Vec::new()
        };
        Jet2 { value: a.value * b.value, grad, hess, order }
    }

    pub fn recip(&self) -> Jet2 {
        let v = self.value;
        self.compose([1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)])
    }

    pub fn div_jet(&self, o: &Jet2) -> Jet2 {
        if o.is_constant() {
            let mut r = self.scale(1.0 / o.value);
            r.order = r.order.min(o.order);
            return r;
        }
        self.mul_jet(&o.recip())
    }

    pub fn powf(&self, p: f64) -> Jet2 {
        let v = self.value;
        self.compose([v.powf(p), p * v.powf(p - 1.0), p * (p - 1.0) * v.powf(p - 2.0)])
    }

    pub fn powi(&self, k: i32) -> Jet2 {
        let v = self.value;
        let kf = k as f64;
        let d1 = if k == 0 { 0.0 } else { kf * v.powi(k - 1) };
        let d2 = if k == 0 || k == 1 { 0.0 } else { kf * (kf - 1.0) * v.powi(k - 2) };
        self.compose([v.powi(k), d1, d2])
    }

    pub fn sqrt(&self) -> Jet2 {
        let r = self.value.sqrt();
        self.compose([r, 0.5 / r, -0.25 / (r * self.value)])
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.compose([s, c, -s])
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.compose([c, -s, -c])
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value.exp();
        self.compose([e, e, e])
    }

    pub fn ln(&self) -> Jet2 {
        let v = self.value;
        self.compose([v.ln(), 1.0 / v, -1.0 / (v * v)])
    }

    pub fn atan(&self) -> Jet2 {
        let v = self.value;
        let q = 1.0 + v * v;
        self.compose([v.atan(), 1.0 / q, -2.0 * v / (q * q)])
    }

    /// Chain rule through a linear change of variables: jet in small coordinates
    /// x_small = x_big[map], expressed as a jet in the big chart of dimension `n`.
    pub fn lift(&self, map: &[usize], n: usize) -> Jet2 {
        if self.is_constant() {
            return self.clone();
        }
        let m = map.len();
        let mut grad = Vec::new();
        if !self.grad.is_empty() {
            grad = vec![0.0; n];
            for (i, &bi) in map.iter().enumerate() {
                grad[bi] = self.grad[i];
            }
        }
        let mut hess = Vec::new();
        if !self.hess.is_empty() {
            hess = vec![0.0; n * (n + 1) / 2];
            for i in 0..m {
                for j in i..m {
                    hess[pidx(n, map[i], map[j])] = self.hess[pidx(m, i, j)];
                }
            }
        }
        Jet2 { value: self.value, grad, hess, order: self.order }
    }

    /// Inverse of `lift`: keep only derivatives along the big-chart directions `map`.
    pub fn restrict(&self, map: &[usize]) -> Jet2 {
        if self.is_constant() {
            return self.clone();
        }
        let n = self.grad.len();
        let m = map.len();
        let grad = if self.grad.is_empty() { Vec::new() } else { map.iter().map(|&i| self.grad[i]).collect() };
        let hess = if self.hess.is_empty() {
            Vec::new()
        } else {
            let mut h = Vec::with_capacity(m * (m + 1) / 2);
            for i in 0..m {
                for j in i..m {
                    h.push(self.hess[pidx(n, map[i], map[j])]);
                }
            }
            h
        };
        Jet2 { value: self.value, grad, hess, order: self.order }
    }

    /// Chain rule for a jet taken at x0 + t(x − x0): derivatives scale by t and t².
    pub fn radial_scale(&self, t: f64) -> Jet2 {
        Jet2 {
            value: self.value,
            grad: self.grad.iter().map(|g| g * t).collect(),
            hess: self.hess.iter().map(|h| h * t * t).collect(),
            order: self.order,
        }
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = self.value.abs();
        for g in self.grad.iter().chain(self.hess.iter()) {
            m = m.max(g.abs());
        }
        m
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, o: &Jet2) -> Jet2 {
        Jet2::lin(self, 1.0, o, 1.0)
    }
}
impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, o: &Jet2) -> Jet2 {
        Jet2::lin(self, 1.0, o, -1.0)
    }
}
impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, o: &Jet2) -> Jet2 {
        self.mul_jet(o)
    }
}
impl Div for &Jet2 {
    type Output = Jet2;
    fn div(self, o: &Jet2) -> Jet2 {
        self.div_jet(o)
    }
}
impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}
macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet2 {
            type Output = Jet2;
            fn $m(self, o: Jet2) -> Jet2 {
                (&self).$m(&o)
            }
        }
        impl $tr<&Jet2> for Jet2 {
            type Output = Jet2;
            fn $m(self, o: &Jet2) -> Jet2 {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);
impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_has_expected_derivatives() {
        let x = Jet2::variable(3.0, 0, 1, 2);
        let y = &x * &x;
        assert_eq!(y.value, 9.0);
        assert_eq!(y.d(0), 6.0);
        assert_eq!(y.dd(0, 0), 2.0);
    }

    #[test]
    fn product_rule_mixed_term() {
        let x = Jet2::variable(2.0, 0, 2, 2);
        let y = Jet2::variable(5.0, 1, 2, 2);
        let p = &x * &y;
        assert_eq!((p.d(0), p.d(1)), (5.0, 2.0));
        assert_eq!(p.dd(0, 1), 1.0);
        assert_eq!(p.dd(0, 0), 0.0);
    }

    #[test]
    fn partial_lowers_order() {
        let x = Jet2::variable(2.0, 0, 1, 2);
        let c = (&x * &x * &x).partial(0);
        assert_eq!(c.order, 1);
        assert_eq!(c.value, 12.0);
        assert_eq!(c.d(0), 12.0);
        assert_eq!(c.partial(0).order, 0);
    }

    #[test]
    fn sin_matches_series() {
        let x = Jet2::variable(0.3, 0, 1, 2);
        let s = x.sin();
        // Maclaurin sums to 20 terms
        let mut sv = 0.0;
        let mut cv = 0.0;
        let mut term = 0.3f64;
        let mut k = 1.0;
        for n in 0..20 {
            if n % 2 == 0 {
                sv += term * if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
            }
            term *= 0.3 / (k + 1.0);
            k += 1.0;
        }
        let mut term = 1.0f64;
        for n in 0..20 {
            cv += term * if n % 2 == 0 { 1.0 } else { -1.0 };
            term *= 0.09 / ((2 * n + 1) as f64 * (2 * n + 2) as f64);
        }
        assert!((s.value - sv).abs() < 1e-12);
        assert!((s.d(0) - cv).abs() < 1e-12);
        assert!((s.dd(0, 0) + sv).abs() < 1e-12);
    }

    #[test]
    fn lift_places_derivatives() {
        let x = Jet2::variable(1.5, 0, 2, 2);
        let y = Jet2::variable(0.5, 1, 2, 2);
        let f = &x * &y;
        let g = f.lift(&[1, 3], 4);
        assert_eq!(g.d(1), 0.5);
        assert_eq!(g.d(3), 1.5);
        assert_eq!(g.dd(1, 3), 1.0);
        assert_eq!(g.dd(3, 1), 1.0);
    }
}
