//! Spin(7) metrics from a complex curve with two commuting circle reductions.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::util::{bundle, chart, On};
use super::{CatalogError, ExpectedRank, Kind, Structure, StructureBundle};
use crate::exterior::{AlmostComplex, DifferentialForm, MetricField};
use crate::fields::{Chart, Embedding, ScalarField};
use crate::specialfns::{airy_prime_univariate, airy_univariate};
use crate::structures::{assemble_spin7, complex_product, ReductionData, SU3Structure};

/// Coordinate indices on the 4-chart (x1, x2, y, s) and on every chart above it.
pub const Y: usize = 2;
pub const S: usize = 3;

/// Curve data over Σ × (y) × (s): ω̃ = F dx12, Υ1 = dx1, Υ2 = −dx2 and u, w on the
/// 4-chart; α, κ on P⁶ = (x1, x2, y, s, x3, x4); ξ on L⁷ (+x5); η on N⁸ (+x6).
#[derive(Clone, Debug)]
pub struct SecondReductionData {
    pub base: Arc<Chart>,
    pub omega_tilde: DifferentialForm,
    pub upsilon1: DifferentialForm,
    pub upsilon2: DifferentialForm,
    pub u: ScalarField,
    pub w: ScalarField,
    /// Complex structure of Σ, acting on (x1, x2) only.
    pub j_sigma: AlmostComplex,
    pub p6: Arc<Chart>,
    pub l7: Arc<Chart>,
    pub n8: Arc<Chart>,
    pub base_in_p: Arc<Embedding>,
    pub alpha: DifferentialForm,
    pub kappa: DifferentialForm,
    pub xi: DifferentialForm,
    pub eta: DifferentialForm,
}

pub(crate) struct Tower {
    pub base: Arc<Chart>,
    pub p: Arc<Chart>,
    pub l: Arc<Chart>,
    pub n: Arc<Chart>,
}

pub(crate) fn tower(tag: &str) -> Tower {
    let mut names = vec!["x1", "x2", "y", "s"];
    let base = chart(&format!("{tag}_base"), &names, &[Y, S]);
    names.extend(["x3", "x4"]);
    let p = chart(&format!("{tag}_p6"), &names, &[Y, S]);
    names.push("x5");
    let l = chart(&format!("{tag}_l7"), &names, &[Y, S]);
    names.push("x6");
    let n = chart(&format!("{tag}_n8"), &names, &[Y, S]);
    Tower { base, p, l, n }
}

impl SecondReductionData {
    /// ω = −α∧dy + κ∧ds + ω̃ and Ω = −i(ys)^{-1/2}(dx1 + i dx2)∧(u dy + iα)∧(κ + i w ds).
    pub fn su3(&self) -> Result<SU3Structure, CatalogError> {
        let e = &self.base_in_p;
        let o = On(self.p6.clone());
        let (y, s) = (o.x(Y), o.x(S));
        let u = self.u.pullback(e)?;
        let w = self.w.pullback(e)?;
        let omega = -self.alpha.wedge(&o.dx(Y)) + self.kappa.wedge(&o.dx(S)) + self.omega_tilde.pullback(e)?;
        let pairs = vec![(o.dx(0), o.dx(1)), (o.dx(Y).scale(&u), self.alpha.clone()), (self.kappa.clone(), o.dx(S).scale(&w))];
        let (re, im) = complex_product(&pairs)?;
        let j = AlmostComplex::from_coframe(pairs, (0..6).collect())?;
        let k = (&y * &s).powf(-0.5);
        // multiplication by −i: (re, im) ↦ (im, −re)
        Ok(SU3Structure::new(omega, im.scale(&k), re.scale(&k).scale_c(-1.0), j)?)
    }

    /// Circle-reduction data with H = y s^{1/3}.
    pub fn reduction(&self) -> Result<ReductionData, CatalogError> {
        let o = On(self.p6.clone());
        let (y, s) = (o.x(Y), o.x(S));
        Ok(ReductionData {
            su3: self.su3()?,
            h: &y * s.powf(1.0 / 3.0),
            s,
            xi: self.xi.clone(),
            eta: Some(self.eta.clone()),
            p_in_l: Embedding::prefix(&self.p6, &self.l7),
            l_in_n: Some(Embedding::prefix(&self.l7, &self.n8)),
            fiber_value: 0.0,
        })
    }

    /// s⁻²η² + y⁻²ξ² + ys(u⁻¹α² + u dy² + w⁻¹κ² + w ds² + F(dx1² + dx2²)) on N⁸.
    pub fn theorem_metric(&self, f: &ScalarField) -> Result<MetricField, CatalogError> {
        let p_in_n = Embedding::prefix(&self.p6, &self.n8);
        let b_in_n = Embedding::prefix(&self.base, &self.n8);
        let o = On(self.n8.clone());
        let (y, s) = (o.x(Y), o.x(S));
        let u = self.u.pullback(&b_in_n)?;
        let w = self.w.pullback(&b_in_n)?;
        let f = f.pullback(&b_in_n)?;
        let ys = &y * &s;
        let xi = self.xi.pullback(&Embedding::prefix(&self.l7, &self.n8))?;
        let inner = MetricField::square(&u.powi(-1), &self.alpha.pullback(&p_in_n)?)
            + MetricField::square(&u, &o.dx(Y))
            + MetricField::square(&w.powi(-1), &self.kappa.pullback(&p_in_n)?)
            + MetricField::square(&w, &o.dx(S))
            + MetricField::square(&f, &o.dx(0))
            + MetricField::square(&f, &o.dx(1));
        Ok(MetricField::square(&s.powi(-2), &self.eta) + MetricField::square(&y.powi(-2), &xi) + inner.scale(&ys))
    }
}

struct Pieces {
    f: ScalarField,
    u: ScalarField,
    w: ScalarField,
    alpha: DifferentialForm,
    kappa: DifferentialForm,
    xi: DifferentialForm,
    eta: DifferentialForm,
}

fn assemble(name: &str, prov: &str, t: Tower, pc: Pieces, domain: Vec<(f64, f64)>) -> Result<(StructureBundle, ScalarField), CatalogError> {
    let b = On(t.base.clone());
    let j_sigma = AlmostComplex::from_coframe(vec![(b.dx(0), b.dx(1))], vec![0, 1])?;
    let data = SecondReductionData {
        omega_tilde: b.dxx(0, 1).scale(&pc.f),
        upsilon1: b.dx(0),
        upsilon2: -b.dx(1),
        u: pc.u,
        w: pc.w,
        j_sigma,
        base_in_p: Embedding::prefix(&t.base, &t.p),
        base: t.base,
        p6: t.p,
        l7: t.l,
        n8: t.n,
        alpha: pc.alpha,
        kappa: pc.kappa,
        xi: pc.xi,
        eta: pc.eta,
    };
    let red = data.reduction()?;
    let sample: Vec<Vec<f64>> = super::sample_box(&domain[..6], 6, 0x2d);
    let sp = assemble_spin7(&red, &sample)?;
    let mut bundle = bundle(name, Kind::Spin7, Structure::Spin7(sp), prov, ExpectedRank::Unknown, domain);
    bundle.connection_potentials = [("alpha", &data.alpha), ("kappa", &data.kappa), ("xi", &data.xi), ("eta", &data.eta)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect();
    bundle.reduction = Some(red);
    bundle.second = Some(data);
    bundle.foliation_coordinate = Some(S);
    Ok((bundle, pc.f))
}

fn domain8(sigma: (f64, f64), y: (f64, f64), s: (f64, f64)) -> Vec<(f64, f64)> {
    let mut d = vec![sigma, sigma, y, s];
    d.extend([(-1.0, 1.0); 4]);
    d
}

/// w = cs, u = y(p+qy), ω̃ = c(p+qy)dx12; α = dx3 + cq x1dx2, κ = dx4,
/// ξ = dx5 + x1dx4 − cs x2ds, η = dx6 + x2dx3 − y x1(p+qy)dy.
pub(crate) fn constant_ii(p: &BTreeMap<String, f64>) -> Result<StructureBundle, CatalogError> {
    let (c, pp, q) = (p["c"], p["p"], p["q"]);
    let ybox = (0.5, 2.0);
    if c <= 0.0 {
        return Err(CatalogError::Params { entry: "constant_II".into(), violated: "c > 0".into() });
    }
    if pp + q * ybox.0 <= 0.0 || pp + q * ybox.1 <= 0.0 {
        return Err(CatalogError::Params { entry: "constant_II".into(), violated: "p + qy > 0".into() });
    }
    let t = tower("constant_II");
    let b = On(t.base.clone());
    let (y, s) = (b.x(Y), b.x(S));
    let lin = &y * q + pp;
    let po = On(t.p.clone());
    let lo = On(t.l.clone());
    let no = On(t.n.clone());
    let pc = Pieces {
        f: lin.scale(c),
        u: &y * &lin,
        w: s.scale(c),
        alpha: po.one(&[(4, po.c(1.0)), (1, po.x(0).scale(c * q))]),
        kappa: po.dx(5),
        xi: lo.one(&[(6, lo.c(1.0)), (5, lo.x(0)), (S, (&lo.x(S) * &lo.x(1)).scale(-c))]),
        eta: no.one(&[(7, no.c(1.0)), (4, no.x(1)), (Y, -(&no.x(Y) * &no.x(0) * (&no.x(Y) * q + pp)))]),
    };
    let (mut bundle, _) = assemble("constant_II", "§11", t, pc, domain8((-1.0, 1.0), ybox, (0.5, 2.0)))?;
    // s⁻²η² + y⁻²ξ² + s(p+qy)⁻¹α² + c⁻¹yκ² + y²s(p+qy)dy² + cys²ds² + csy(p+qy)(dx1² + dx2²)
    let printed = {
        let o = On(bundle.chart.clone());
        let (y, s) = (o.x(Y), o.x(S));
        let lin = &y * q + pp;
        let data = bundle.second.as_ref().expect("second reduction data");
        let p_in_n = Embedding::prefix(&data.p6, &data.n8);
        let xi = data.xi.pullback(&Embedding::prefix(&data.l7, &data.n8))?;
        let csy = (&s * &y).scale(c) * &lin;
        MetricField::square(&s.powi(-2), &data.eta)
            + MetricField::square(&y.powi(-2), &xi)
            + MetricField::square(&(&s / &lin), &data.alpha.pullback(&p_in_n)?)
            + MetricField::square(&y.scale(1.0 / c), &data.kappa.pullback(&p_in_n)?)
            + MetricField::square(&(y.powi(2) * &s * &lin), &o.dx(Y))
            + MetricField::square(&(&y * s.powi(2)).scale(c), &o.dx(S))
            + MetricField::square(&csy, &o.dx(0))
            + MetricField::square(&csy, &o.dx(1))
    };
    bundle.printed_metric = Some(printed);
    Ok(bundle)
}

/// r = x1² + x2² on x1, x2 ∈ [0.8, 1.6]: F = y ln r, w = s ln r, u = y²;
/// α = dx3 + (x1 ln r − 2x1 + 2x2 atan(x1/x2))dx2, κ = dx4 − ½s² d^c ln r,
/// ξ = dx5 + x1dx4 + ½s² ln r dx2, η = dx6 + x2dx3 − x1y²dy.
pub(crate) fn log_example() -> Result<StructureBundle, CatalogError> {
    let t = tower("log_example");
    let b = On(t.base.clone());
    let r = |o: &On| &o.x(0) * &o.x(0) + &o.x(1) * &o.x(1);
    let lr = r(&b).ln();
    let po = On(t.p.clone());
    let (x1, x2, s) = (po.x(0), po.x(1), po.x(S));
    let rp = r(&po);
    let a2 = &x1 * rp.ln() - x1.scale(2.0) + (&x2 * (&x1 / &x2).atan()).scale(2.0);
    let hs = s.powi(2).scale(0.5);
    // d^c ln r = (2x2/r)dx1 − (2x1/r)dx2
    let kappa = po.one(&[(5, po.c(1.0)), (0, -(&hs * &x2 / &rp).scale(2.0)), (1, (&hs * &x1 / &rp).scale(2.0))]);
    let lo = On(t.l.clone());
    let xi = lo.one(&[(6, lo.c(1.0)), (5, lo.x(0)), (1, lo.x(S).powi(2).scale(0.5) * r(&lo).ln())]);
    let no = On(t.n.clone());
    let eta = no.one(&[(7, no.c(1.0)), (4, no.x(1)), (Y, -(&no.x(0) * no.x(Y).powi(2)))]);
    let pc = Pieces {
        f: &b.x(Y) * &lr,
        u: b.x(Y).powi(2),
        w: &b.x(S) * &lr,
        alpha: po.one(&[(4, po.c(1.0)), (1, a2)]),
        kappa,
        xi,
        eta,
    };
    let (mut bundle, f) = assemble("log_example", "§12", t, pc, domain8((0.8, 1.6), (0.5, 2.0), (0.5, 2.0)))?;
    let data = bundle.second.clone().expect("second reduction data");
    bundle.printed_metric = Some(data.theorem_metric(&f)?);
    Ok(bundle)
}

/// u = y Ai(y) sin x1, w = s, F = Ai(y) sin x1 on x1 ∈ [0.5, 2.5]; α = dx3 − Ai′(y)cos x1 dx2,
/// κ = dx4, ξ = dx5 + x1dx4 − s x2 ds, η = dx6 + x2dx3 + y Ai(y) cos x1 dy.
pub(crate) fn airy_example() -> Result<StructureBundle, CatalogError> {
    let t = tower("airy_example");
    let b = On(t.base.clone());
    let ai = b.x(Y).compose(airy_univariate());
    let f = &ai * b.x(0).sin();
    let po = On(t.p.clone());
    let aip = po.x(Y).compose(airy_prime_univariate());
    let lo = On(t.l.clone());
    let no = On(t.n.clone());
    let ain = no.x(Y).compose(airy_univariate());
    let pc = Pieces {
        u: &b.x(Y) * &f,
        w: b.x(S),
        alpha: po.one(&[(4, po.c(1.0)), (1, -(&aip * po.x(0).cos()))]),
        kappa: po.dx(5),
        xi: lo.one(&[(6, lo.c(1.0)), (5, lo.x(0)), (S, -(&lo.x(S) * &lo.x(1)))]),
        eta: no.one(&[(7, no.c(1.0)), (4, no.x(1)), (Y, &no.x(Y) * &ain * no.x(0).cos())]),
        f,
    };
    let (mut bundle, f) = assemble("airy_example", "§12", t, pc, domain8((0.5, 2.5), (0.5, 2.0), (0.5, 2.0)))?;
    let data = bundle.second.clone().expect("second reduction data");
    bundle.printed_metric = Some(data.theorem_metric(&f)?);
    Ok(bundle)
}
