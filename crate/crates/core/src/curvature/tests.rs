use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use super::*;
use crate::exterior::{AlmostComplex, DifferentialForm, MetricField};
use crate::fields::{Chart, ScalarField};

fn sphere() -> MetricField {
    // Round unit sphere in (θ, φ).
    let c = Chart::new("s2", &["theta", "phi"]).with_domain(0, 0.0, std::f64::consts::PI).shared();
    let th = ScalarField::coord(&c, 0);
    MetricField::diagonal(&c, &[ScalarField::constant(&c, 1.0), th.sin().powi(2)])
}

fn warped(c: &Arc<Chart>) -> MetricField {
    // A generic non-diagonal metric on R³.
    let x = ScalarField::coord(c, 0);
    let y = ScalarField::coord(c, 1);
    let z = ScalarField::coord(c, 2);
    let one = ScalarField::constant(c, 1.0);
    let a = DifferentialForm::one_form(c, &[(0, one.clone()), (1, x.sin().scale(0.3))]);
    let b = DifferentialForm::one_form(c, &[(1, (&y * &z).scale(0.2).exp()), (2, x.scale(0.1))]);
    let e = DifferentialForm::one_form(c, &[(2, one.clone() + (&x * &x).scale(0.1)), (0, y.scale(0.2))]);
    MetricField::square(&one, &a) + MetricField::square(&one, &b) + MetricField::square(&one, &e)
}

#[test]
fn flat_metric_has_no_curvature() {
    let c = Chart::new("r4", &["a", "b", "c", "d"]).shared();
    let s = curvature_at(&MetricField::identity(&c), &[0.1, 0.2, 0.3, 0.4]).unwrap();
    assert_eq!(s.max_abs_riemann(), 0.0);
    assert_eq!(s.scalar, 0.0);
    let cert = curvature_operator_rank(&MetricField::identity(&c), &[vec![0.0; 4]]).unwrap();
    assert_eq!(cert.operator_rank, 0);
    assert_eq!(cert.status, CertificateStatus::Certified);
}

#[test]
fn round_sphere_scalar_curvature() {
    let g = sphere();
    for th in [0.3, 1.0, 2.5] {
        let s = curvature_at(&g, &[th, 0.7]).unwrap();
        assert!((s.scalar - 2.0).abs() < 1e-12, "{}", s.scalar);
        // Ric = g for the unit sphere.
        assert!((s.ric(1, 1) - th.sin().powi(2)).abs() < 1e-12);
    }
    let cert = curvature_operator_rank(&g, &[vec![1.0, 0.0]]).unwrap();
    assert_eq!(cert.operator_rank, 1);
}

#[test]
fn symmetries_and_first_bianchi() {
    let c = Chart::new("r3", &["x", "y", "z"]).shared();
    let g = warped(&c);
    let s = curvature_at(&g, &[0.3, -0.4, 0.8]).unwrap();
    let n = 3;
    let m = s.max_abs_riemann();
    assert!(m > 1e-3);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let r = s.r(i, j, k, l);
                    assert!((r + s.r(j, i, k, l)).abs() < 1e-12 * m);
                    assert!((r + s.r(i, j, l, k)).abs() < 1e-12 * m);
                    assert!((r - s.r(k, l, i, j)).abs() < 1e-10 * m);
                }
            }
        }
    }
    assert!(s.bianchi_residual < 1e-7);
}

#[test]
fn second_bianchi_by_finite_differences() {
    // ∇_e R_abcd + ∇_c R_abde + ∇_d R_abec = 0, with covariant derivatives from
    // central differences of samples and the Christoffel symbols at the centre.
    let c = Chart::new("r3", &["x", "y", "z"]).shared();
    let g = warped(&c);
    let x0 = [0.2, 0.1, -0.3];
    let n = 3;
    let h = 1e-4;
    let s0 = curvature_at(&g, &x0).unwrap();
    let dr: Vec<CurvatureSample> = (0..n)
        .flat_map(|e| {
            [1.0, -1.0].into_iter().map(move |sg| {
                let mut x = x0;
                x[e] += sg * h;
                x
            })
        })
        .map(|x| curvature_at(&g, &x).unwrap())
        .collect();
    let gam = |k: usize, i: usize, j: usize| s0.christoffel[(k * n + i) * n + j];
    let nabla = |e: usize, a: usize, b: usize, cc: usize, d: usize| {
        let mut v = (dr[2 * e].r(a, b, cc, d) - dr[2 * e + 1].r(a, b, cc, d)) / (2.0 * h);
        for p in 0..n {
            v -= gam(p, e, a) * s0.r(p, b, cc, d) + gam(p, e, b) * s0.r(a, p, cc, d) + gam(p, e, cc) * s0.r(a, b, p, d) + gam(p, e, d) * s0.r(a, b, cc, p);
        }
        v
    };
    let m = s0.max_abs_riemann();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        worst = worst.max((nabla(e, a, b, cc, d) + nabla(cc, a, b, d, e) + nabla(d, a, b, e, cc)).abs());
                    }
                }
            }
        }
    }
    assert!(worst / m < 1e-5, "{worst}");
}

#[test]
fn rank_is_frame_independent() {
    let c = Chart::new("r3", &["x", "y", "z"]).shared();
    let g = warped(&c);
    let x = [0.1, 0.5, -0.2];
    let mut rng = Pcg64::seed_from_u64(7);
    let a = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
    let q = a.qr().q();
    let s1 = operator_singular_values(&g, &x, None).unwrap();
    let s2 = operator_singular_values(&g, &x, Some(&q)).unwrap();
    for (a, b) in s1.iter().zip(&s2) {
        assert!((a - b).abs() < 1e-10 * s1[0]);
    }
    assert_eq!(rank_and_gap(&s1).0, rank_and_gap(&s2).0);
}

#[test]
fn kahler_ricci_form_on_product_of_spheres() {
    // S² × S² with J rotating each factor: Ricci form equals the Kähler form.
    let c = Chart::new("s2s2", &["t1", "p1", "t2", "p2"]).shared();
    let s1 = ScalarField::coord(&c, 0).sin();
    let s2 = ScalarField::coord(&c, 2).sin();
    let g = MetricField::diagonal(&c, &[ScalarField::constant(&c, 1.0), s1.powi(2), ScalarField::constant(&c, 1.0), s2.powi(2)]);
    let pairs = vec![
        (DifferentialForm::dx(&c, 0), DifferentialForm::dx(&c, 1).scale(&s1)),
        (DifferentialForm::dx(&c, 2), DifferentialForm::dx(&c, 3).scale(&s2)),
    ];
    let j = AlmostComplex::from_coframe(pairs, (0..4).collect()).unwrap();
    // ω(X, JY) = g(X, Y) fixes ω = s1 dt1∧dp1 + s2 dt2∧dp2 for this J, and ρ = ω.
    let w = (DifferentialForm::dx(&c, 0) ^ DifferentialForm::dx(&c, 1)).scale(&s1)
        + (DifferentialForm::dx(&c, 2) ^ DifferentialForm::dx(&c, 3)).scale(&s2);
    let hg = MetricField::hermitian(&w, &j);
    let x = [0.7, 0.1, 1.9, 0.4];
    let a = hg.values_at(&x).unwrap();
    let b = g.values_at(&x).unwrap();
    for (p, q) in a.iter().zip(&b) {
        assert!((p - q).abs() < 1e-14);
    }
    let r = ricci_form_residual(&g, &j, &w, &[x.to_vec()]).unwrap();
    assert!(r < 1e-12, "{r}");
}
