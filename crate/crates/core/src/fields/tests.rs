use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use super::*;

fn chart() -> Arc<Chart> {
    Chart::new("r3", &["x", "y", "z"]).shared()
}

/// Expression tree mirrored by a plain f64 evaluator, which serves as the oracle.
#[derive(Clone, Debug)]
enum Expr {
    X(usize),
    C(f64),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Atan(Box<Expr>),
    // exp(sin a), so nesting stays bounded
    ExpSin(Box<Expr>),
    // 1/(1 + a²)
    Bump(Box<Expr>),
    // sqrt(1 + a²)
    Hyp(Box<Expr>),
    // ln(1 + a²)
    LogHyp(Box<Expr>),
}

impl Expr {
    fn field(&self, c: &Arc<Chart>) -> ScalarField {
        let one = |a: &ScalarField| ScalarField::constant(c, 1.0) + a * a;
        match self {
            Expr::X(i) => ScalarField::coord(c, *i),
            Expr::C(v) => ScalarField::constant(c, *v),
            Expr::Add(a, b) => a.field(c) + b.field(c),
            Expr::Mul(a, b) => a.field(c) * b.field(c),
            Expr::Sin(a) => a.field(c).sin(),
            Expr::Cos(a) => a.field(c).cos(),
            Expr::Atan(a) => a.field(c).atan(),
            Expr::ExpSin(a) => a.field(c).sin().exp(),
            Expr::Bump(a) => 1.0 / one(&a.field(c)),
            Expr::Hyp(a) => one(&a.field(c)).sqrt(),
            Expr::LogHyp(a) => one(&a.field(c)).ln(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::X(i) => x[*i],
            Expr::C(v) => *v,
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Sin(a) => a.eval(x).sin(),
            Expr::Cos(a) => a.eval(x).cos(),
            Expr::Atan(a) => a.eval(x).atan(),
            Expr::ExpSin(a) => a.eval(x).sin().exp(),
            Expr::Bump(a) => 1.0 / (1.0 + a.eval(x).powi(2)),
            Expr::Hyp(a) => (1.0 + a.eval(x).powi(2)).sqrt(),
            Expr::LogHyp(a) => (1.0 + a.eval(x).powi(2)).ln(),
        }
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0usize..3).prop_map(Expr::X), (-1.0f64..1.0).prop_map(Expr::C)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            inner.clone().prop_map(move |x| Expr::Sin(b(x))),
            inner.clone().prop_map(move |x| Expr::Cos(b(x))),
            inner.clone().prop_map(move |x| Expr::Atan(b(x))),
            inner.clone().prop_map(move |x| Expr::ExpSin(b(x))),
            inner.clone().prop_map(move |x| Expr::Bump(b(x))),
            inner.clone().prop_map(move |x| Expr::Hyp(b(x))),
            inner.prop_map(move |x| Expr::LogHyp(b(x))),
        ]
    })
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(i, d) in moves {
        y[i] += d;
    }
    y
}

/// Richardson extrapolation of a second-order stencil.
fn richardson(stencil: impl Fn(f64) -> f64, h: f64) -> f64 {
    (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0
}

type Poly = BTreeMap<[u8; 3], f64>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            *out.entry(e).or_insert(0.0) += ca * cb;
        }
    }
    out
}

fn affine(c: &[f64]) -> Poly {
    let mut p = Poly::new();
    p.insert([0, 0, 0], c[0]);
    p.insert([1, 0, 0], c[1]);
    p.insert([0, 1, 0], c[2]);
    p.insert([0, 0, 1], c[3]);
    p
}

/// Value of ∂^d p at x, summing |terms| alongside for a cancellation-aware scale.
fn poly_deriv(p: &Poly, d: [u8; 3], x: &[f64]) -> (f64, f64) {
    let (mut v, mut scale) = (0.0, 0.0);
    for (e, c) in p {
        let mut t = *c;
        for i in 0..3 {
            if e[i] < d[i] {
                t = 0.0;
                break;
            }
            let falling: u32 = (0..d[i]).map(|k| (e[i] - k) as u32).product();
            t *= falling as f64 * x[i].powi((e[i] - d[i]) as i32);
        }
        v += t;
        scale += t.abs();
    }
    (v, scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jets_match_richardson_differences(e in expr(), x in prop::collection::vec(-1.0f64..1.0, 3)) {
        let c = chart();
        let j = e.field(&c).eval_at(&x, 2).unwrap();
        let f = |y: Vec<f64>| e.eval(&y);
        prop_assert!((j.value - f(x.clone())).abs() <= 1e-14 * j.value.abs().max(1.0));
        for i in 0..3 {
            let fd = richardson(|h| (f(shifted(&x, &[(i, h)])) - f(shifted(&x, &[(i, -h)]))) / (2.0 * h), 2e-3);
            prop_assert!((fd - j.d(i)).abs() <= 1e-7 * j.d(i).abs().max(1.0), "d{}: {} vs {}", i, fd, j.d(i));
            for k in i..3 {
                let fd = if i == k {
                    richardson(|h| (f(shifted(&x, &[(i, h)])) - 2.0 * f(x.clone()) + f(shifted(&x, &[(i, -h)]))) / (h * h), 1e-2)
                } else {
                    richardson(
                        |h| {
                            (f(shifted(&x, &[(i, h), (k, h)])) - f(shifted(&x, &[(i, h), (k, -h)])) - f(shifted(&x, &[(i, -h), (k, h)]))
                                + f(shifted(&x, &[(i, -h), (k, -h)])))
                                / (4.0 * h * h)
                        },
                        1e-2,
                    )
                };
                prop_assert!((fd - j.dd(i, k)).abs() <= 1e-5 * j.dd(i, k).abs().max(1.0), "d{}{}: {} vs {}", i, k, fd, j.dd(i, k));
            }
        }
    }

    #[test]
    fn polynomial_jets_are_exact(
        factors in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 4), 1..=4),
        extra in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 4), 0..=2),
        x in prop::collection::vec(-1.5f64..1.5, 3),
    ) {
        let c = chart();
        let lin = |k: &[f64]| ScalarField::constant(&c, k[0]) + k[1] * ScalarField::coord(&c, 0) + k[2] * ScalarField::coord(&c, 1) + k[3] * ScalarField::coord(&c, 2);
        // product of the factors plus a product of the extra affine pieces: degree ≤ 4 overall
        let mut field = lin(&factors[0]);
        let mut poly = affine(&factors[0]);
        for k in &factors[1..] {
            field = field * lin(k);
            poly = poly_mul(&poly, &affine(k));
        }
        if !extra.is_empty() {
            let mut f2 = lin(&extra[0]);
            let mut p2 = affine(&extra[0]);
            for k in &extra[1..] {
                f2 = f2 * lin(k);
                p2 = poly_mul(&p2, &affine(k));
            }
            field = field + f2;
            for (e, v) in p2 {
                *poly.entry(e).or_insert(0.0) += v;
            }
        }
        let j = field.eval_at(&x, 2).unwrap();
        let unit = |i: usize| { let mut d = [0u8; 3]; d[i] += 1; d };
        let close = |got: f64, (want, scale): (f64, f64)| (got - want).abs() <= 1e-13 * scale.max(1.0);
        prop_assert!(close(j.value, poly_deriv(&poly, [0, 0, 0], &x)));
        for i in 0..3 {
            prop_assert!(close(j.d(i), poly_deriv(&poly, unit(i), &x)), "d{}", i);
            for k in 0..3 {
                let mut d = unit(i);
                d[k] += 1;
                prop_assert!(close(j.dd(i, k), poly_deriv(&poly, d, &x)), "d{}{}", i, k);
            }
        }
    }
}
