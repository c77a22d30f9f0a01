//! Nilmanifold examples over (0,0,0,0,13+42) and (0,0,0,0,24).

use std::sync::Arc;

use super::util::{bundle, chart, On};
use super::{CatalogError, ExpectedRank, Identification, Kind, Structure, StructureBundle};
use crate::exterior::{AlmostComplex, DifferentialForm, MetricField};
use crate::fields::{Chart, Embedding, ScalarField};
use crate::structures::{assemble_g2, assemble_spin7, complex_product, ReductionData, SU3Structure, SU4Structure};

const P6: [&str; 6] = ["x1", "x2", "x3", "x4", "x5", "t"];
const T: usize = 5;

fn box8() -> Vec<(f64, f64)> {
    let mut d = vec![(-1.0, 1.0); 8];
    d[T] = (0.5, 2.0);
    d
}

/// The base, circle and double-circle charts, with prefix embeddings.
struct Charts {
    p: Arc<Chart>,
    l: Arc<Chart>,
    n: Arc<Chart>,
}

fn charts(tag: &str) -> Charts {
    let mut names = P6.to_vec();
    let p = chart(&format!("{tag}_p6"), &names, &[T]);
    names.push("x6");
    let l = chart(&format!("{tag}_l7"), &names, &[T]);
    names.push("x7");
    let n = chart(&format!("{tag}_n8"), &names, &[T]);
    Charts { p, l, n }
}

fn sample_p6(n: usize) -> Vec<Vec<f64>> {
    super::sample_box(&box8()[..6], n, 0xb0a7)
}

/// GLPS SU(3) data with fiber factor −t^{-k}e⁵ + i t^k dt.
struct GlpsBase {
    su3: SU3Structure,
    e5: DifferentialForm,
}

fn e5_glps(p: &On) -> DifferentialForm {
    // de⁵ = e¹³ + e⁴²
    p.one(&[(4, p.c(1.0)), (0, -p.x(2)), (3, -p.x(1))])
}

fn glps_base(p: &On, k: f64) -> Result<GlpsBase, CatalogError> {
    let t = p.x(T);
    let e5 = e5_glps(p);
    let sigma2 = p.dxx(0, 2) + p.dxx(3, 1);
    let omega = p.dx(T).wedge(&e5) + sigma2.scale(&t);
    let pairs = vec![(p.dx(0), p.dx(2)), (p.dx(3), p.dx(1)), (e5.scale(&t.powf(-k)).scale_c(-1.0), p.dx(T).scale(&t.powf(k)))];
    let (re, im) = complex_product(&pairs)?;
    let j = AlmostComplex::from_coframe(pairs, (0..6).collect())?;
    let su3 = SU3Structure::new(omega, re.scale(&t), im.scale(&t), j)?;
    Ok(GlpsBase { su3, e5 })
}

fn xi_glps(l: &On) -> DifferentialForm {
    // dξ = σ3
    l.one(&[(6, l.c(1.0)), (3, l.x(0)), (2, l.x(1))])
}

fn eta_glps(n: &On) -> DifferentialForm {
    // dη = σ1
    n.one(&[(7, n.c(1.0)), (1, n.x(0)), (3, n.x(2))])
}

pub(crate) fn glps_reduction(k: f64, h_exp: f64, with_eta: bool) -> Result<(ReductionData, DifferentialForm), CatalogError> {
    let ch = charts(if with_eta { "glps" } else { "glps_g2" });
    let p = On(ch.p.clone());
    let base = glps_base(&p, k)?;
    let t = p.x(T);
    let (s, eta, l_in_n) = if with_eta {
        (t.clone(), Some(eta_glps(&On(ch.n.clone()))), Some(Embedding::prefix(&ch.l, &ch.n)))
    } else {
        (p.c(1.0), None, None)
    };
    let data = ReductionData {
        su3: base.su3,
        s,
        h: t.powf(h_exp),
        xi: xi_glps(&On(ch.l.clone())),
        eta,
        p_in_l: Embedding::prefix(&ch.p, &ch.l),
        l_in_n,
        fiber_value: 0.0,
    };
    Ok((data, base.e5))
}

fn potentials(data: &ReductionData, e5: &DifferentialForm) -> std::collections::BTreeMap<String, DifferentialForm> {
    let mut m = std::collections::BTreeMap::new();
    m.insert("e5".into(), e5.clone());
    m.insert("xi".into(), data.xi.clone());
    if let Some(eta) = &data.eta {
        m.insert("eta".into(), eta.clone());
    }
    m
}

pub(crate) fn glps_spin7() -> Result<StructureBundle, CatalogError> {
    let (data, e5) = glps_reduction(2.0, 4.0 / 3.0, true)?;
    let sp = assemble_spin7(&data, &sample_p6(6))?;
    let mut b = bundle("glps_spin7", Kind::Spin7, Structure::Spin7(sp), "§6", ExpectedRank::Exact(21), box8());
    b.connection_potentials = potentials(&data, &e5);
    b.identification = Some(glps_to_constant_i(&b.chart));
    b.reduction = Some(data);
    b.foliation_coordinate = Some(T);
    Ok(b)
}

/// (x1..x5, t, x6, x7) ↦ (x1, x3, −x4, −x2, t, x5 − x1x3 − x2x4, x6, x7) carries the
/// hyperkähler triple (σ2, −σ3, −σ1) to the flat one used by `constant_I` and matches
/// e⁵, ξ, η with α, ξ, η there.
fn glps_to_constant_i(c: &Arc<Chart>) -> Identification {
    let o = On(c.clone());
    let map = vec![
        o.x(0),
        o.x(2),
        -o.x(3),
        -o.x(1),
        o.x(T),
        o.x(4) - o.x(0) * o.x(2) - o.x(1) * o.x(3),
        o.x(6),
        o.x(7),
    ];
    let target_params = [("A", 1.0), ("c", 0.0), ("a", 0.0), ("b", 0.0), ("p", 0.0), ("q", 1.0)]
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    Identification { target: "constant_I".into(), target_params, map }
}

pub(crate) fn glps_g2() -> Result<StructureBundle, CatalogError> {
    let (data, e5) = glps_reduction(1.5, 1.0, false)?;
    let g2 = assemble_g2(&data, &sample_p6(6))?;
    let mut b = bundle("glps_g2", Kind::G2, Structure::G2(g2), "§6", ExpectedRank::Exact(14), box8()[..7].to_vec());
    b.connection_potentials = potentials(&data, &e5);
    b.reduction = Some(data);
    b.foliation_coordinate = Some(T);
    Ok(b)
}

pub(crate) fn glps_cy() -> Result<StructureBundle, CatalogError> {
    let ch = charts("glps_cy");
    let p = On(ch.p.clone());
    let base = glps_base(&p, 1.0)?;
    let mut b = bundle("glps_cy", Kind::Su3, Structure::Su3(base.su3), "§6", ExpectedRank::Exact(8), box8()[..6].to_vec());
    b.connection_potentials.insert("e5".into(), base.e5);
    b.foliation_coordinate = Some(T);
    Ok(b)
}

/// Calabi-type lift of the GLPS Calabi-Yau 3-fold: chart (x1..x5, t, x6, s) with
/// dη̂ = −ω for η̂ = dx6 − t e⁵.
pub(crate) fn glps_su4() -> Result<StructureBundle, CatalogError> {
    let c = chart("glps_su4", &["x1", "x2", "x3", "x4", "x5", "t", "x6", "s"], &[T, 7]);
    let o = On(c.clone());
    let (t, s) = (o.x(T), o.x(7));
    let e5 = e5_glps(&o);
    let sigma2 = o.dxx(0, 2) + o.dxx(3, 1);
    let omega = o.dx(T).wedge(&e5) + sigma2.scale(&t);
    let eta_hat = o.dx(6) - e5.scale(&t);
    let s23 = s.powf(2.0 / 3.0);
    let omega_hat = omega.scale(&s23) + eta_hat.wedge(&o.dx(7).scale(&s.powf(-1.0 / 3.0).scale(2.0 / 3.0)));
    let pairs = vec![
        (o.dx(0), o.dx(2)),
        (o.dx(3), o.dx(1)),
        (e5.scale(&t.powi(-1)).scale_c(-1.0), o.dx(T).scale(&t)),
        (-&eta_hat, o.dx(7).scale(&s.powf(5.0 / 3.0).scale(-2.0 / 3.0))),
    ];
    let (re, im) = complex_product(&pairs)?;
    let j = AlmostComplex::from_coframe(pairs, (0..8).collect())?;
    let su4 = SU4Structure::new(omega_hat, re.scale(&t), im.scale(&t), j)?;
    // s^{2/3}(t²dt² + t^{-2}(e⁵)² + t g_T⁴) + s^{-2}η̂² + (⅔ s^{2/3} ds)²
    let tor = MetricField::diagonal(&c, &[t.clone(), t.clone(), t.clone(), t.clone(), o.c(0.0), o.c(0.0), o.c(0.0), o.c(0.0)]);
    let inner = MetricField::square(&t.powi(2), &o.dx(T)) + MetricField::square(&t.powi(-2), &e5) + tor;
    let printed = inner.scale(&s23)
        + MetricField::square(&s.powi(-2), &eta_hat)
        + MetricField::square(&s.powf(4.0 / 3.0).scale(4.0 / 9.0), &o.dx(7));
    let mut domain = box8();
    domain[7] = (0.5, 2.0);
    let mut b = bundle("glps_su4", Kind::Su4, Structure::Su4(su4), "§6", ExpectedRank::AtMost(15), domain);
    b.connection_potentials.insert("e5".into(), e5);
    b.connection_potentials.insert("eta_hat".into(), eta_hat);
    b.printed_metric = Some(printed);
    Ok(b)
}

fn e5_nil(p: &On) -> DifferentialForm {
    // de⁵ = e²⁴
    p.one(&[(4, p.c(1.0)), (3, p.x(1))])
}

/// (0,0,0,0,24) data: Ω = i t θ1θ2 (−2t^m dt + i t^{-n} e⁵).
fn nil24_reduction(m: f64, n: f64, h_exp: f64, with_eta: bool) -> Result<(ReductionData, DifferentialForm), CatalogError> {
    let ch = charts(if with_eta { "nil24" } else { "nil24_g2" });
    let p = On(ch.p.clone());
    let t = p.x(T);
    let e5 = e5_nil(&p);
    let omega = p.dxx(0, 2) + p.dx(T).wedge(&e5).scale(&t.scale(-2.0)) + p.dxx(1, 3).scale(&-t.powi(2));
    let pairs = vec![(p.dx(0), p.dx(2)), (p.dx(3), p.dx(1)), (p.dx(T).scale(&t.powf(m).scale(-2.0)), e5.scale(&t.powf(-n)))];
    let (re, im) = complex_product(&pairs)?;
    let j = AlmostComplex::from_coframe(pairs, (0..6).collect())?;
    // multiplication by i: (re, im) ↦ (−im, re)
    let su3 = SU3Structure::new(omega, im.scale(&t).scale_c(-1.0), re.scale(&t), j)?;
    let l = On(ch.l.clone());
    let xi = l.one(&[(6, l.c(1.0)), (3, -l.x(0)), (2, -l.x(1))]);
    let (s, eta, l_in_n) = if with_eta {
        let nn = On(ch.n.clone());
        let eta = nn.one(&[(7, nn.c(1.0)), (1, -nn.x(0)), (3, -nn.x(2))]);
        (t.powi(2), Some(eta), Some(Embedding::prefix(&ch.l, &ch.n)))
    } else {
        (p.c(1.0), None, None)
    };
    let data = ReductionData { su3, s, h: t.powf(h_exp), xi, eta, p_in_l: Embedding::prefix(&ch.p, &ch.l), l_in_n, fiber_value: 0.0 };
    Ok((data, e5))
}

pub(crate) fn nil24_spin7() -> Result<StructureBundle, CatalogError> {
    let (data, e5) = nil24_reduction(4.0, 3.0, 8.0 / 3.0, true)?;
    let sp = assemble_spin7(&data, &sample_p6(6))?;
    let c = sp.metric.chart().clone();
    let o = On(c.clone());
    let t = o.x(T);
    let e5n = e5.pullback(&data.p_in_n().expect("two circles"))?;
    let eta = data.eta.clone().expect("two circles");
    let xi = data.xi.pullback(data.l_in_n.as_ref().expect("two circles"))?;
    let sq = |f: ScalarField, a: &DifferentialForm| MetricField::square(&f.powi(2), a);
    let printed = sq(t.powi(2), &o.dx(0))
        + sq(t.powi(3), &o.dx(1))
        + sq(t.powi(2), &o.dx(2))
        + sq(t.powi(3), &o.dx(3))
        + sq(t.powi(-1), &e5n)
        + sq(t.powi(-2), &eta)
        + sq(t.powi(-2), &xi)
        + MetricField::square(&t.powi(12).scale(4.0), &o.dx(T));
    let mut b = bundle("nil24_spin7", Kind::Spin7, Structure::Spin7(sp), "§7", ExpectedRank::Exact(21), box8());
    b.connection_potentials = potentials(&data, &e5);
    b.printed_metric = Some(printed);
    b.reduction = Some(data);
    b.foliation_coordinate = Some(T);
    Ok(b)
}

pub(crate) fn nil24_g2() -> Result<StructureBundle, CatalogError> {
    let (data, e5) = nil24_reduction(3.0, 2.0, 2.0, false)?;
    let g2 = assemble_g2(&data, &sample_p6(6))?;
    let mut b = bundle("nil24_g2", Kind::G2, Structure::G2(g2), "§7", ExpectedRank::Exact(14), box8()[..7].to_vec());
    b.connection_potentials = potentials(&data, &e5);
    b.reduction = Some(data);
    b.foliation_coordinate = Some(T);
    Ok(b)
}
