use crate::catalog::util::On;
use crate::catalog::{CorollaryIData, SecondReductionData, COROLLARY_S as S, SECOND_S, SECOND_Y};
use crate::exterior::{DifferentialForm, MetricField, PForm};
use crate::fields::Embedding;
use crate::structures::{G2Structure, ResidualReport};

use super::PdeError;

const M: [usize; 4] = [0, 1, 2, 3];

fn rel(a: &PForm, b: &PForm) -> f64 {
    a.max_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

fn lift(x: &[f64], n: usize) -> Vec<f64> {
    let mut v = x.to_vec();
    v.resize(n, 0.0);
    v
}

/// d^c_M u with d_M the differential along the first four coordinates.
fn dc_m(u: &DifferentialForm, d: &CorollaryIData) -> DifferentialForm {
    u.d_along(&M).apply_j(&d.j1)
}

/// Residuals of the two equations on M⁴ × (s) and of the three curvature
/// prescriptions, at points of the 5-chart Q.
///
/// For A ≠ 0 the equations are ½u(ω2²+ω3²) = A⁻¹s(s+c)ω̃1∧ω̃1 and
/// d_M d^c_M u = A²∂²_s ω̃1, with dξ = −ω2, dη = −Aω3 and
/// dα = −A⁻¹d^c_M u∧ds + A∂_s ω̃1.
///
/// A = 0 is the truncation s ≡ 1, where the last coordinate of Q is read as H:
/// ½u(ω2²+ω3²) = Hω̃1∧ω̃1, d_M d^c_M u = ∂²_H ω̃1, dξ = −ω2 and
/// dα = −d^c_M u∧dH + ∂_H ω̃1; η is not checked.
pub fn check_reduction_i(d: &CorollaryIData, points: &[Vec<f64>]) -> Result<ResidualReport, PdeError> {
    let q = On(d.q.clone());
    let a = d.a_const;
    let s = q.x(S);
    let coef = if a == 0.0 { s.clone() } else { (&s * (&s + d.c)).scale(1.0 / a) };
    let lhs1 = (d.omega2.wedge(&d.omega2) + d.omega3.wedge(&d.omega3)).scale(&d.u).scale_c(0.5);
    let rhs1 = d.omega_tilde1.wedge(&d.omega_tilde1).scale(&coef);
    let u = DifferentialForm::function(&d.u);
    let dcu = dc_m(&u, d);
    let lhs2 = dcu.d_along(&M);
    let (a2, a_alpha, a_inv) = if a == 0.0 { (1.0, 1.0, 1.0) } else { (a * a, a, 1.0 / a) };
    let rhs2 = d.omega_tilde1.partial(S).partial(S).scale_c(a2);
    let dalpha_rhs = (dcu.wedge(&q.dx(S)).scale_c(-a_inv) + d.omega_tilde1.partial(S).scale_c(a_alpha)).pullback(&d.q_in_l)?;
    let dalpha = d.alpha.d();
    let dxi = d.xi.d();
    let dxi_rhs = (-&d.omega2).pullback(&d.q_in_l)?;
    let q_in_n = Embedding::prefix(&d.q, &d.n8);
    let deta = d.eta.d();
    let deta_rhs = d.omega3.scale_c(-a).pullback(&q_in_n)?;
    let (nl, nn) = (d.l7.dim(), d.n8.dim());
    let mut r = ResidualReport::new();
    for x in points {
        r.record("equ1", rel(&lhs1.eval_at(x, 0)?, &rhs1.eval_at(x, 0)?), x);
        r.record("equ2", rel(&lhs2.eval_at(x, 0)?, &rhs2.eval_at(x, 0)?), x);
        let xl = lift(x, nl);
        r.record("d_alpha", rel(&dalpha.eval_at(&xl, 0)?, &dalpha_rhs.eval_at(&xl, 0)?), x);
        r.record("d_xi", rel(&dxi.eval_at(&xl, 0)?, &dxi_rhs.eval_at(&xl, 0)?), x);
        if a != 0.0 {
            let xn = lift(x, nn);
            r.record("d_eta", rel(&deta.eval_at(&xn, 0)?, &deta_rhs.eval_at(&xn, 0)?), x);
        }
    }
    Ok(r)
}

/// Closed G2 form of the truncation s ≡ 1 on L⁷, with H the last coordinate of Q:
/// φ = ξ∧(ω̃1 − α∧dH) + Hω2∧α + uH ω3∧dH and
/// g = H⁻²ξ² + Hu⁻¹α² + Hu dH² + H g_{ω̃1}.
pub fn apostolov_salamon_g2(d: &CorollaryIData) -> Result<G2Structure, PdeError> {
    let e = &d.q_in_l;
    let l = On(d.l7.clone());
    let h = l.x(S);
    let dh = l.dx(S);
    let w1 = d.omega_tilde1.pullback(e)?;
    let u = d.u.pullback(e)?;
    let phi = d.xi.wedge(&(w1 - d.alpha.wedge(&dh)))
        + d.omega2.pullback(e)?.wedge(&d.alpha).scale(&h)
        + d.omega3.pullback(e)?.wedge(&dh).scale(&(&u * &h));
    let g = MetricField::square(&h.powi(-2), &d.xi)
        + MetricField::square(&(&h / &u), &d.alpha)
        + MetricField::square(&(&h * &u), &dh)
        + d.g_tilde().pullback(e).scale(&h);
    Ok(G2Structure::new(phi, g)?)
}

/// Residuals of the four equations on Σ × (y) × (s) and of the curvature
/// prescriptions of α, κ, ξ, η, at points of the 4-chart (x1, x2, y, s):
///
/// −(sy)ω̃ = (uw)Υ1∧Υ2, ∂²_y ω̃ = dd^c u, ∂²_s ω̃ = dd^c w, ∂_y∂_s ω̃ = 0,
/// dα = −d^c u∧dy + ∂_y ω̃, dκ = d^c w∧ds − ∂_s ω̃,
/// dξ = Υ1∧κ + Υ2∧w ds, dη = α∧Υ2 + u dy∧Υ1,
///
/// where d and d^c are taken along Σ.
pub fn check_reduction_ii(d: &SecondReductionData, points: &[Vec<f64>]) -> Result<ResidualReport, PdeError> {
    let (y_i, s_i) = (SECOND_Y, SECOND_S);
    let sigma = [0, 1];
    let b = On(d.base.clone());
    let (y, s) = (b.x(y_i), b.x(s_i));
    let dc = |f: &crate::fields::ScalarField| DifferentialForm::function(f).d_along(&sigma).apply_j(&d.j_sigma);
    let dcu = dc(&d.u);
    let dcw = dc(&d.w);
    let w = &d.omega_tilde;
    let e1_l = -w.scale(&(&s * &y));
    let e1_r = d.upsilon1.wedge(&d.upsilon2).scale(&(&d.u * &d.w));
    let e2_l = w.partial(y_i).partial(y_i);
    let e2_r = dcu.d_along(&sigma);
    let e3_l = w.partial(s_i).partial(s_i);
    let e3_r = dcw.d_along(&sigma);
    let e4 = w.partial(y_i).partial(s_i);

    let bp = &d.base_in_p;
    let pl = Embedding::prefix(&d.p6, &d.l7);
    let bn = Embedding::prefix(&d.base, &d.n8);
    let pn = Embedding::prefix(&d.p6, &d.n8);
    let bl = Embedding::prefix(&d.base, &d.l7);
    let da = d.alpha.d();
    let da_r = (-dcu.wedge(&b.dx(y_i)) + w.partial(y_i)).pullback(bp)?;
    let dk = d.kappa.d();
    let dk_r = (dcw.wedge(&b.dx(s_i)) - w.partial(s_i)).pullback(bp)?;
    let dxi = d.xi.d();
    let dxi_r = d.upsilon1.pullback(&bl)?.wedge(&d.kappa.pullback(&pl)?)
        + d.upsilon2.wedge(&b.dx(s_i).scale(&d.w)).pullback(&bl)?;
    let deta = d.eta.d();
    let deta_r = d.alpha.pullback(&pn)?.wedge(&d.upsilon2.pullback(&bn)?) + b.dx(y_i).scale(&d.u).wedge(&d.upsilon1).pullback(&bn)?;

    let mut r = ResidualReport::new();
    for x in points {
        r.record("equation1", rel(&e1_l.eval_at(x, 0)?, &e1_r.eval_at(x, 0)?), x);
        r.record("equation2", rel(&e2_l.eval_at(x, 0)?, &e2_r.eval_at(x, 0)?), x);
        r.record("equation3", rel(&e3_l.eval_at(x, 0)?, &e3_r.eval_at(x, 0)?), x);
        r.record("equation4", e4.eval_at(x, 0)?.max_abs(), x);
        let xp = lift(x, d.p6.dim());
        r.record("d_alpha", rel(&da.eval_at(&xp, 0)?, &da_r.eval_at(&xp, 0)?), x);
        r.record("d_kappa", rel(&dk.eval_at(&xp, 0)?, &dk_r.eval_at(&xp, 0)?), x);
        let xl = lift(x, d.l7.dim());
        r.record("d_xi", rel(&dxi.eval_at(&xl, 0)?, &dxi_r.eval_at(&xl, 0)?), x);
        let xn = lift(x, d.n8.dim());
        r.record("d_eta", rel(&deta.eval_at(&xn, 0)?, &deta_r.eval_at(&xn, 0)?), x);
    }
    Ok(r)
}
