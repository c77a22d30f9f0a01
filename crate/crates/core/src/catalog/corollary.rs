//! Spin(7) metrics from an s-dependent hyperkähler-type triple over a 4-manifold.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::hyperkahler::{flat_hyperkahler, gibbons_hawking_triple, monopole_on, tod_on, HyperkahlerData};
use super::util::{bundle, chart, On};
use super::{sample_box, CatalogError, ExpectedRank, Kind, Structure, StructureBundle};
use crate::exterior::{AlmostComplex, DifferentialForm, MetricField};
use crate::fields::{Chart, Embedding, ScalarField};
use crate::specialfns::{pcf_prime_univariate, pcf_univariate};
use crate::structures::{spin7_from_g2, G2Structure, Spin7Structure};

/// Index of s on every chart below; M occupies 0..4.
pub const S: usize = 4;

/// Reduction data over M⁴ × (s): ω̃1, ω2, ω3, u and J1 live on the 5-chart Q
/// (M coordinates then s), α and ξ on L⁷ = Q × (x5, x6), η on N⁸ = L⁷ × (x7).
#[derive(Clone, Debug)]
pub struct CorollaryIData {
    pub a_const: f64,
    pub c: f64,
    pub hk: HyperkahlerData,
    pub q: Arc<Chart>,
    pub omega_tilde1: DifferentialForm,
    pub omega2: DifferentialForm,
    pub omega3: DifferentialForm,
    pub u: ScalarField,
    pub j1: AlmostComplex,
    pub l7: Arc<Chart>,
    pub n8: Arc<Chart>,
    pub q_in_l: Arc<Embedding>,
    pub l_in_n: Arc<Embedding>,
    pub alpha: DifferentialForm,
    pub xi: DifferentialForm,
    pub eta: DifferentialForm,
}

/// Q, L⁷ and N⁸ over the chart of `hk`.
pub(crate) struct Tower {
    pub q: Arc<Chart>,
    pub l: Arc<Chart>,
    pub n: Arc<Chart>,
}

pub(crate) fn tower(tag: &str, m: &Arc<Chart>) -> Tower {
    let mut names: Vec<&str> = m.coord_names.iter().map(|s| s.as_str()).collect();
    names.push("s");
    let q = chart(&format!("{tag}_q5"), &names, &[S]);
    names.extend(["x5", "x6"]);
    let l = chart(&format!("{tag}_l7"), &names, &[S]);
    names.push("x7");
    let n = chart(&format!("{tag}_n8"), &names, &[S]);
    Tower { q, l, n }
}

/// Coframe pairs of J1 for the flat and Gibbons-Hawking triples, written on any chart
/// whose first four coordinates are those of M.
fn j1_pairs(o: &On, v_theta: Option<(&ScalarField, &DifferentialForm)>) -> Vec<(DifferentialForm, DifferentialForm)> {
    match v_theta {
        None => vec![(o.dx(0), o.dx(1)), (o.dx(2), o.dx(3))],
        Some((v, theta)) => {
            let rv = v.sqrt();
            vec![(theta.scale(&rv.powi(-1)), o.dx(0).scale(&rv)), (o.dx(1).scale(&rv), o.dx(2).scale(&rv))]
        }
    }
}

impl CorollaryIData {
    pub fn s_on_l(&self) -> ScalarField {
        ScalarField::coord(&self.l7, S)
    }

    /// g_{ω̃1}(X, Y) = ω̃1(X, J1 Y) on Q.
    pub fn g_tilde(&self) -> MetricField {
        MetricField::hermitian(&self.omega_tilde1, &self.j1)
    }

    /// φ = ξ∧(ω̃1 + A⁻¹ds∧α) + A⁻¹(s+c) ω2∧α + A⁻²u(s+c) ω3∧ds on L⁷ with
    /// g_φ = s^{-2/3}(A²(s+c)⁻²ξ² + s(s+c)(Au)⁻¹α² + s(s+c)uA⁻³ds² + A⁻¹s(s+c) g_{ω̃1}).
    pub fn g2(&self) -> Result<G2Structure, CatalogError> {
        let e = &self.q_in_l;
        let o = On(self.l7.clone());
        let a = self.a_const;
        let s = o.x(S);
        let sc = &s + self.c;
        let ds = o.dx(S);
        let w1 = self.omega_tilde1.pullback(e)?;
        let w2 = self.omega2.pullback(e)?;
        let w3 = self.omega3.pullback(e)?;
        let u = self.u.pullback(e)?;
        let phi = self.xi.wedge(&(w1 + ds.wedge(&self.alpha).scale_c(1.0 / a)))
            + w2.wedge(&self.alpha).scale(&sc.scale(1.0 / a))
            + w3.wedge(&ds).scale(&(&u * &sc).scale(1.0 / (a * a)));
        let ssc = &s * &sc;
        let g = MetricField::square(&sc.powi(-2).scale(a * a), &self.xi)
            + MetricField::square(&(&ssc / &u).scale(1.0 / a), &self.alpha)
            + MetricField::square(&(&ssc * &u).scale(a.powi(-3)), &ds)
            + self.g_tilde().pullback(e).scale(&ssc.scale(1.0 / a));
        Ok(G2Structure::new(phi, g.scale(&s.powf(-2.0 / 3.0)))?)
    }

    pub fn spin7(&self) -> Result<Spin7Structure, CatalogError> {
        let g2 = self.g2()?;
        Ok(spin7_from_g2(&self.eta, &g2, &self.s_on_l(), &self.l_in_n)?)
    }

    /// min over `points` (on Q) of u and s + c; both must stay positive.
    pub fn positivity(&self, points: &[Vec<f64>]) -> Result<(f64, f64), CatalogError> {
        let mut um = f64::INFINITY;
        let mut sm = f64::INFINITY;
        for x in points {
            um = um.min(self.u.value_at(x)?);
            sm = sm.min(x[S] + self.c);
        }
        Ok((um, sm))
    }
}

fn param(p: &BTreeMap<String, f64>, k: &str) -> f64 {
    p[k]
}

fn violated(entry: &str, what: &str) -> CatalogError {
    CatalogError::Params { entry: entry.into(), violated: what.into() }
}

fn domain8(m: &[(f64, f64)], s: (f64, f64)) -> Vec<(f64, f64)> {
    let mut d = m.to_vec();
    d.push(s);
    d.extend([(-1.0, 1.0); 3]);
    d
}

struct Assembled {
    data: CorollaryIData,
    spin7: Spin7Structure,
}

/// ω̃1 = (a+bs)ω0 + (p+qs)ω1 and u = A⁻¹s(s+c)((p+qs)² − (a+bs)²) over `hk`,
/// with the potentials supplied on L⁷ and N⁸.
fn linear_family(
    p: &BTreeMap<String, f64>,
    hk: HyperkahlerData,
    t: Tower,
    j1: AlmostComplex,
    alpha: DifferentialForm,
    xi: DifferentialForm,
    eta: DifferentialForm,
) -> Result<Assembled, CatalogError> {
    let (a_const, c) = (param(p, "A"), param(p, "c"));
    let (a, b, pp, q) = (param(p, "a"), param(p, "b"), param(p, "p"), param(p, "q"));
    let m_in_q = Embedding::prefix(&hk.chart, &t.q);
    let o = On(t.q.clone());
    let s = o.x(S);
    let f0 = &s * b + a;
    let f1 = &s * q + pp;
    let w0 = match &hk.omega0 {
        Some(w) => w.pullback(&m_in_q)?,
        None => DifferentialForm::zero(&t.q, 2),
    };
    let omega_tilde1 = w0.scale(&f0) + hk.omega1.pullback(&m_in_q)?.scale(&f1);
    let u = (&s * (&s + c) / a_const) * (&f1 * &f1 - &f0 * &f0);
    let data = CorollaryIData {
        a_const,
        c,
        omega2: hk.omega2.pullback(&m_in_q)?,
        omega3: hk.omega3.pullback(&m_in_q)?,
        hk,
        q_in_l: Embedding::prefix(&t.q, &t.l),
        l_in_n: Embedding::prefix(&t.l, &t.n),
        q: t.q,
        omega_tilde1,
        u,
        j1,
        l7: t.l,
        n8: t.n,
        alpha,
        xi,
        eta,
    };
    let spin7 = data.spin7()?;
    Ok(Assembled { data, spin7 })
}

/// p+qs > |a+bs| and s+c > 0 on [s_lo, s_hi], A > 0.
fn check_linear(entry: &str, p: &BTreeMap<String, f64>, s_lo: f64, s_hi: f64) -> Result<(), CatalogError> {
    let (a_const, c) = (param(p, "A"), param(p, "c"));
    let (a, b, pp, q) = (param(p, "a"), param(p, "b"), param(p, "p"), param(p, "q"));
    if a_const <= 0.0 {
        return Err(violated(entry, "A > 0"));
    }
    if !(s_lo > 0.0 && s_hi > s_lo) {
        return Err(violated(entry, "0 < s_lo < s_hi"));
    }
    for s in [s_lo, s_hi] {
        if pp + q * s <= (a + b * s).abs() {
            return Err(violated(entry, "p + qs > |a + bs|"));
        }
        if s + c <= 0.0 {
            return Err(violated(entry, "s + c > 0"));
        }
    }
    Ok(())
}

fn potentials(d: &CorollaryIData) -> BTreeMap<String, DifferentialForm> {
    [("alpha", &d.alpha), ("xi", &d.xi), ("eta", &d.eta)].into_iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn finish(name: &str, provenance: &str, asm: Assembled, domain: Vec<(f64, f64)>) -> Result<StructureBundle, CatalogError> {
    let q_pts: Vec<Vec<f64>> = sample_box(&domain[..5], 64, 0x9).into_iter().collect();
    let (umin, smin) = asm.data.positivity(&q_pts)?;
    if umin <= 0.0 {
        return Err(violated(name, "u > 0"));
    }
    if smin <= 0.0 {
        return Err(violated(name, "s + c > 0"));
    }
    let mut b = bundle(name, Kind::Spin7, Structure::Spin7(asm.spin7), provenance, ExpectedRank::Unknown, domain);
    b.connection_potentials = potentials(&asm.data);
    b.corollary = Some(asm.data);
    b.foliation_coordinate = Some(S);
    Ok(b)
}

/// Flat triple with the linear potentials
/// α = dx5 + A(b(x1dx2 − x3dx4) + q(x1dx2 + x3dx4)), ξ = dx6 − x1dx3 − x4dx2,
/// η = dx7 − A(x1dx4 + x2dx3).
pub(crate) fn constant_i(p: &BTreeMap<String, f64>) -> Result<StructureBundle, CatalogError> {
    let (s_lo, s_hi) = (param(p, "s_lo"), param(p, "s_hi"));
    check_linear("constant_I", p, s_lo, s_hi)?;
    let m = chart("constant_I_m", &["x1", "x2", "x3", "x4"], &[]);
    let hk = flat_hyperkahler(&m)?;
    let t = tower("constant_I", &m);
    let (a_const, b, q) = (param(p, "A"), param(p, "b"), param(p, "q"));
    let l = On(t.l.clone());
    let alpha = l.one(&[(5, l.c(1.0)), (1, l.x(0).scale(a_const * (b + q))), (3, l.x(2).scale(a_const * (q - b)))]);
    let xi = l.one(&[(6, l.c(1.0)), (2, -l.x(0)), (1, -l.x(3))]);
    let n = On(t.n.clone());
    let eta = n.one(&[(7, n.c(1.0)), (3, n.x(0).scale(-a_const)), (2, n.x(1).scale(-a_const))]);
    let j1 = AlmostComplex::from_coframe(j1_pairs(&On(t.q.clone()), None), vec![0, 1, 2, 3])?;
    let asm = linear_family(p, hk, t, j1, alpha, xi, eta)?;
    let domain = domain8(&[(-1.0, 1.0); 4], (s_lo, s_hi));
    finish("constant_I", "§5", asm, domain)
}

const GH_M: [(f64, f64); 4] = [(-1.0, 1.0), (0.5, 1.5), (0.5, 1.5), (-1.0, 1.0)];
const TOD_M: [(f64, f64); 4] = [(-1.0, 1.0), (-1.0, 0.5), (-1.0, 1.0), (-1.0, 1.0)];
const S_BOX: (f64, f64) = (0.5, 2.0);

/// (a, b, q) = (0, 0, 1), A = 1 over the single-center Gibbons-Hawking space.
/// The potentials are explicit primitives: with γ1 = v0 y dz + m(y dz − z dy)/(2r)
/// and its cyclic shifts, α = dx5 − xθ + γ1, ξ = dx6 + yθ − γ2, η = dx7 + zθ − γ3.
pub(crate) fn gh_spin7(p: &BTreeMap<String, f64>) -> Result<StructureBundle, CatalogError> {
    let (c, pp, v0, mm) = (param(p, "c"), param(p, "p"), param(p, "v0"), param(p, "m"));
    if v0 < 0.0 || mm < 0.0 || (v0 == 0.0 && mm == 0.0) {
        return Err(violated("gh_spin7", "V > 0"));
    }
    let full: BTreeMap<String, f64> =
        [("A", 1.0), ("c", c), ("a", 0.0), ("b", 0.0), ("p", pp), ("q", 1.0)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
    check_linear("gh_spin7", &full, S_BOX.0, S_BOX.1)?;
    let (v, a) = super::hyperkahler::gh_monopole(v0, mm);
    let hk = gibbons_hawking_triple(&v, &a, &GH_M[..3])?;
    let t = tower("gh", &hk.chart);
    let gh_forms = |o: &On| {
        let (v, a) = monopole_on(o, v0, mm);
        let theta = o.dx(3) + a;
        let (x, y, z) = (o.x(0), o.x(1), o.x(2));
        let r = (&x * &x + &y * &y + &z * &z).sqrt();
        let h = r.powi(-1).scale(mm / 2.0);
        let g1 = o.one(&[(2, (&h + v0) * &y), (1, -(&h * &z))]);
        let g2 = o.one(&[(0, (&h + v0) * &z), (2, -(&h * &x))]);
        let g3 = o.one(&[(1, (&h + v0) * &x), (0, -(&h * &y))]);
        (v, theta, [x, y, z], [g1, g2, g3])
    };
    let l = On(t.l.clone());
    let (_, th, [x, y, _], [g1, g2, _]) = gh_forms(&l);
    let alpha = l.dx(5) - th.scale(&x) + g1;
    let xi = l.dx(6) + th.scale(&y) - g2;
    let n = On(t.n.clone());
    let (_, th, [_, _, z], [_, _, g3]) = gh_forms(&n);
    let eta = n.dx(7) + th.scale(&z) - g3;
    let qo = On(t.q.clone());
    let (vq, thq, _, _) = gh_forms(&qo);
    let j1 = AlmostComplex::from_coframe(j1_pairs(&qo, Some((&vq, &thq))), vec![0, 1, 2, 3])?;
    let asm = linear_family(&full, hk, t, j1, alpha, xi, eta)?;
    // s⁻²η² + (s+c)⁻²ξ² + (s+p)⁻²α² + s²(s+c)²(s+p)²ds² + s(s+c)(s+p) g_M
    let printed = {
        let d = &asm.data;
        let o = On(d.n8.clone());
        let s = o.x(S);
        let (sc, sp) = (&s + c, &s + pp);
        let (v, th, _, _) = gh_forms(&o);
        let xi = d.xi.pullback(&d.l_in_n)?;
        let al = d.alpha.pullback(&d.l_in_n)?;
        let g_m = MetricField::square(&v.powi(-1), &th)
            + MetricField::diagonal(&d.n8, &[v.clone(), v.clone(), v.clone(), o.c(0.0), o.c(0.0), o.c(0.0), o.c(0.0), o.c(0.0)]);
        MetricField::square(&s.powi(-2), &d.eta)
            + MetricField::square(&sc.powi(-2), &xi)
            + MetricField::square(&sp.powi(-2), &al)
            + MetricField::square(&(&s * &sc * &sp).powi(2), &o.dx(S))
            + g_m.scale(&(&s * &sc * &sp))
    };
    let mut b = finish("gh_spin7", "§6", asm, domain8(&GH_M, S_BOX))?;
    b.printed_metric = Some(printed);
    Ok(b)
}

/// (a, b, q) = (0, 1, 1), A = 1 over the x-independent Gibbons-Hawking space of
/// V = v0 + eps·e^y cos z. With W = eps·e^y sin z, Ψ = v0 z + eps(1−y)e^y sin z and
/// Ξ = v0 y + eps·e^y(cos z + z sin z): α = dx5 − 2xθ + x²dW, ξ = dx6 + yθ − Ψdx,
/// η = dx7 + zθ + Ξdx.
pub(crate) fn tod_spin7(p: &BTreeMap<String, f64>) -> Result<StructureBundle, CatalogError> {
    let (c, pp, v0, eps) = (param(p, "c"), param(p, "p"), param(p, "v0"), param(p, "eps"));
    let full: BTreeMap<String, f64> =
        [("A", 1.0), ("c", c), ("a", 0.0), ("b", 1.0), ("p", pp), ("q", 1.0)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
    check_linear("tod_spin7", &full, S_BOX.0, S_BOX.1)?;
    // V ≥ v0 − |eps|·e^{y_max} on the box
    if v0 - eps.abs() * TOD_M[1].1.exp() <= 0.0 {
        return Err(violated("tod_spin7", "V > 0"));
    }
    let (v, a) = super::hyperkahler::tod_potential(v0, eps);
    let hk = gibbons_hawking_triple(&v, &a, &TOD_M[..3])?;
    let t = tower("tod", &hk.chart);
    let tod_forms = |o: &On| {
        let (v, a) = tod_on(o, v0, eps);
        let theta = o.dx(3) + a;
        let (x, y, z) = (o.x(0), o.x(1), o.x(2));
        let ey = y.exp().scale(eps);
        let dw = o.one(&[(2, &ey * z.cos()), (1, &ey * z.sin())]);
        let psi = z.scale(v0) + &ey * (1.0 - &y) * z.sin();
        let big_xi = y.scale(v0) + &ey * (z.cos() + &z * z.sin());
        (v, theta, [x, y, z], dw, psi, big_xi)
    };
    let l = On(t.l.clone());
    let (_, th, [x, y, _], dw, psi, _) = tod_forms(&l);
    let alpha = l.dx(5) - th.scale(&x.scale(2.0)) + dw.scale(&(&x * &x));
    let xi = l.dx(6) + th.scale(&y) - l.dx(0).scale(&psi);
    let n = On(t.n.clone());
    let (_, th, [_, _, z], _, _, big_xi) = tod_forms(&n);
    let eta = n.dx(7) + th.scale(&z) + n.dx(0).scale(&big_xi);
    let qo = On(t.q.clone());
    let (vq, thq, ..) = tod_forms(&qo);
    let j1 = AlmostComplex::from_coframe(j1_pairs(&qo, Some((&vq, &thq))), vec![0, 1, 2, 3])?;
    let asm = linear_family(&full, hk, t, j1, alpha, xi, eta)?;
    // s⁻²η² + (s+c)⁻²ξ² + p⁻¹(2s+p)⁻¹α² + p s²(s+c)²(2s+p)ds² + s(s+c) g_{ω̃1},
    // g_{ω̃1} = (2s+p)(V⁻¹θ² + V dx²) + pV(dy² + dz²)
    let printed = {
        let d = &asm.data;
        let o = On(d.n8.clone());
        let s = o.x(S);
        let sc = &s + c;
        let k = s.scale(2.0) + pp;
        let (v, th, ..) = tod_forms(&o);
        let xi = d.xi.pullback(&d.l_in_n)?;
        let al = d.alpha.pullback(&d.l_in_n)?;
        let z0 = o.c(0.0);
        let g_t = MetricField::square(&(&k / &v), &th)
            + MetricField::diagonal(&d.n8, &[&k * &v, v.scale(pp), v.scale(pp), z0.clone(), z0.clone(), z0.clone(), z0.clone(), z0]);
        MetricField::square(&s.powi(-2), &d.eta)
            + MetricField::square(&sc.powi(-2), &xi)
            + MetricField::square(&k.powi(-1).scale(1.0 / pp), &al)
            + MetricField::square(&((&s * &sc).powi(2) * &k).scale(pp), &o.dx(S))
            + g_t.scale(&(&s * &sc))
    };
    let mut b = finish("tod_spin7", "§7", asm, domain8(&TOD_M, S_BOX))?;
    b.printed_metric = Some(printed);
    Ok(b)
}

/// A = 1, c = 0 over flat ℝ⁴ with ω1 = σ1, ω2 = −σ2, ω3 = −σ3,
/// ω̃1 = σ1 + v(s) sin x1 dx12 and u = s²f, f = 1 + v(s) sin x1, v(s) = U(0, √2 s).
pub(crate) fn perturbed_glps(p: &BTreeMap<String, f64>) -> Result<StructureBundle, CatalogError> {
    let (s_lo, s_hi) = (param(p, "s_lo"), param(p, "s_hi"));
    let threshold = crate::specialfns::domain_threshold_u_less_one();
    let (v_hi_domain_lo, v_hi_domain_hi) = crate::specialfns::pcf().domain();
    if !(s_lo > threshold && s_hi > s_lo && s_lo >= v_hi_domain_lo && s_hi <= v_hi_domain_hi) {
        return Err(violated("perturbed_glps", "v(s) < 1"));
    }
    let m = chart("perturbed_m", &["x1", "x2", "x3", "x4"], &[]);
    let flat = flat_hyperkahler(&m)?;
    let hk = HyperkahlerData {
        omega2: -&flat.omega2,
        omega3: -&flat.omega3,
        omega0: None,
        ..flat
    };
    let t = tower("perturbed", &m);
    let q = On(t.q.clone());
    let s = q.x(S);
    let v = s.compose(pcf_univariate());
    let f = 1.0 + &v * q.x(0).sin();
    let m_in_q = Embedding::prefix(&m, &t.q);
    let omega_tilde1 = hk.omega1.pullback(&m_in_q)? + q.dxx(0, 1).scale(&(&v * q.x(0).sin()));
    let u = s.powi(2) * &f;
    let l = On(t.l.clone());
    let vdot = l.x(S).compose(pcf_prime_univariate());
    let alpha = l.dx(5) - l.dx(1).scale(&(&vdot * l.x(0).cos()));
    let xi = l.one(&[(6, l.c(1.0)), (0, -l.x(2)), (3, -l.x(1))]);
    let n = On(t.n.clone());
    let eta = n.one(&[(7, n.c(1.0)), (0, -n.x(3)), (1, -n.x(2))]);
    let j1 = AlmostComplex::from_coframe(j1_pairs(&q, None), vec![0, 1, 2, 3])?;
    let data = CorollaryIData {
        a_const: 1.0,
        c: 0.0,
        omega2: hk.omega2.pullback(&m_in_q)?,
        omega3: hk.omega3.pullback(&m_in_q)?,
        hk,
        q_in_l: Embedding::prefix(&t.q, &t.l),
        l_in_n: Embedding::prefix(&t.l, &t.n),
        q: t.q,
        omega_tilde1,
        u,
        j1,
        l7: t.l,
        n8: t.n,
        alpha,
        xi,
        eta,
    };
    let spin7 = data.spin7()?;
    // s²(f(dx1² + dx2²) + dx3² + dx4²) + f⁻¹α² + s⁻²(ξ² + η²) + s⁴f ds²
    let printed = {
        let o = On(data.n8.clone());
        let s = o.x(S);
        let f = 1.0 + o.x(S).compose(pcf_univariate()) * o.x(0).sin();
        let s2 = s.powi(2);
        let z0 = o.c(0.0);
        let xi = data.xi.pullback(&data.l_in_n)?;
        let al = data.alpha.pullback(&data.l_in_n)?;
        MetricField::diagonal(&data.n8, &[&s2 * &f, &s2 * &f, s2.clone(), s2.clone(), z0.clone(), z0.clone(), z0.clone(), z0])
            + MetricField::square(&f.powi(-1), &al)
            + MetricField::square(&s.powi(-2), &xi)
            + MetricField::square(&s.powi(-2), &data.eta)
            + MetricField::square(&(s.powi(4) * &f), &o.dx(S))
    };
    let asm = Assembled { data, spin7 };
    let mut b = finish("perturbed_glps", "§9", asm, domain8(&[(-1.0, 1.0); 4], (s_lo, s_hi)))?;
    b.printed_metric = Some(printed);
    Ok(b)
}
