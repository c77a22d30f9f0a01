//! Hyperkähler triples on 4-charts: flat space and the Gibbons-Hawking ansatz.

use std::sync::Arc;

use super::util::{chart, On};
use super::{sample_box, top, CatalogError};
use crate::exterior::multi::mask_of;
use crate::exterior::{AlmostComplex, DifferentialForm, MetricField};
use crate::fields::{Chart, Embedding, ScalarField};
use crate::structures::{ResidualReport, StructureError};

/// Triple (ω1, ω2, ω3) with the complex structure J1 of ω1 and an optional
/// anti-self-dual ω0 of type (1,1) for J1.
#[derive(Clone, Debug)]
pub struct HyperkahlerData {
    pub chart: Arc<Chart>,
    pub omega1: DifferentialForm,
    pub omega2: DifferentialForm,
    pub omega3: DifferentialForm,
    pub omega0: Option<DifferentialForm>,
    pub j1: AlmostComplex,
    pub metric: MetricField,
}

impl HyperkahlerData {
    /// Algebraic triple identities against vol_g, plus closure of every ωᵢ.
    pub fn check_at(&self, x: &[f64]) -> Result<ResidualReport, StructureError> {
        let mut r = ResidualReport::new();
        let w = [self.omega1.eval_at(x, 1)?, self.omega2.eval_at(x, 1)?, self.omega3.eval_at(x, 1)?];
        let g = self.metric.eval_full(x, 0)?;
        let vol = g.sqrt_det.value;
        let o = top(&w[0].wedge(&w[0])).signum();
        for i in 0..3 {
            r.record(&format!("half_omega{}_squared", i + 1), (0.5 * top(&w[i].wedge(&w[i])) * o - vol).abs() / vol, x);
            r.record(&format!("d_omega{}", i + 1), w[i].d().max_abs(), x);
            for j in i + 1..3 {
                r.record(&format!("omega{}_omega{}", i + 1, j + 1), top(&w[i].wedge(&w[j])).abs() / vol, x);
            }
        }
        if let Some(w0) = &self.omega0 {
            let w0 = w0.eval_at(x, 1)?;
            r.record("half_omega0_squared", (0.5 * top(&w0.wedge(&w0)) * o + vol).abs() / vol, x);
            r.record("omega0_omega1", top(&w0.wedge(&w[0])).abs() / vol, x);
            r.record("d_omega0", w0.d().max_abs(), x);
        }
        r.record("j1_square", self.j1.square_residual(x)?, x);
        let h = MetricField::hermitian(&self.omega1, &self.j1).values_at(x)?;
        let gv = g.g.values();
        let scale = gv.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        r.record("metric_hermitian", h.iter().zip(&gv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale, x);
        Ok(r)
    }

    pub fn verify(&self, points: &[Vec<f64>], tol: f64) -> Result<ResidualReport, StructureError> {
        let mut total = ResidualReport::new();
        for x in points {
            let r = self.check_at(x)?;
            if let Some((name, v)) = r.first_failure(tol) {
                return Err(StructureError::Invariant { identity: format!("hyperkähler {name}"), point: x.clone(), residual: v });
            }
            total.merge(&r);
        }
        Ok(total)
    }
}

/// Flat ℝ⁴: ω1 = dx12 + dx34, ω2 = dx13 + dx42, ω3 = dx14 + dx23, ω0 = dx12 − dx34.
pub fn flat_hyperkahler(chart: &Arc<Chart>) -> Result<HyperkahlerData, CatalogError> {
    let o = On(chart.clone());
    let j1 = AlmostComplex::from_coframe(vec![(o.dx(0), o.dx(1)), (o.dx(2), o.dx(3))], vec![0, 1, 2, 3])?;
    let mut g = vec![o.c(0.0); chart.dim()];
    for gi in g.iter_mut().take(4) {
        *gi = o.c(1.0);
    }
    Ok(HyperkahlerData {
        chart: chart.clone(),
        omega1: o.dxx(0, 1) + o.dxx(2, 3),
        omega2: o.dxx(0, 2) + o.dxx(3, 1),
        omega3: o.dxx(0, 3) + o.dxx(1, 2),
        omega0: Some(o.dxx(0, 1) - o.dxx(2, 3)),
        j1,
        metric: MetricField::diagonal(chart, &g),
    })
}

/// Precondition residuals of the ansatz on the 3-chart: (max |ΔV|, max |dθ + *dV|, min V).
pub fn gibbons_hawking_preconditions(v: &ScalarField, a: &DifferentialForm, x: &[f64]) -> Result<(f64, f64, f64), StructureError> {
    let vj = v.eval_at(x, 2)?;
    let lap = vj.dd(0, 0) + vj.dd(1, 1) + vj.dd(2, 2);
    let da = a.eval_at(x, 1)?.d();
    let (vx, vy, vz) = (vj.d(0), vj.d(1), vj.d(2));
    // *dx = dy∧dz, *dy = dz∧dx, *dz = dx∧dy
    let mono = (da.get(mask_of(&[1, 2])) + vx)
        .abs()
        .max((da.get(mask_of(&[0, 2])) - vy).abs())
        .max((da.get(mask_of(&[0, 1])) + vz).abs());
    Ok((lap.abs(), mono, vj.value))
}

/// θ = dw + a on (x, y, z, w) for a positive harmonic V with da = −*dV; the triple is
/// ωᵢ = θ∧dxᵢ + V dxⱼ∧dxₖ, plus ω0 = θ∧dx − V dy∧dz when ∂V/∂x = 0. The preconditions are checked at
/// 64 points of `domain` (a box in the 3-chart).
pub fn gibbons_hawking_triple(v: &ScalarField, a: &DifferentialForm, domain: &[(f64, f64)]) -> Result<HyperkahlerData, CatalogError> {
    let base = v.chart().clone();
    if base.dim() != 3 || a.degree() != 1 {
        return Err(StructureError::Precondition { name: "three-dimensional base".into(), residual: f64::INFINITY }.into());
    }
    let (mut lap, mut mono, mut vmin, mut vx) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for x in sample_box(domain, 64, 0x6b) {
        let (l, m, vv) = gibbons_hawking_preconditions(v, a, &x)?;
        lap = lap.max(l);
        mono = mono.max(m);
        vmin = vmin.min(vv);
        vx = vx.max(v.eval_at(&x, 1)?.d(0).abs());
    }
    if vmin <= 0.0 {
        return Err(StructureError::Precondition { name: "V > 0".into(), residual: vmin }.into());
    }
    if lap >= 1e-10 {
        return Err(StructureError::Precondition { name: "harmonic V".into(), residual: lap }.into());
    }
    if mono >= 1e-9 {
        return Err(StructureError::Precondition { name: "dθ = −*dV".into(), residual: mono }.into());
    }
    let names: Vec<&str> = base.coord_names.iter().map(|s| s.as_str()).chain(["w"]).collect();
    let m = chart(&format!("{}_gh", base.name), &names, &[]);
    let emb = Embedding::prefix(&base, &m);
    let o = On(m.clone());
    let v = v.pullback(&emb)?;
    let theta = o.dx(3) + a.pullback(&emb)?;
    let triple = |i: usize, j: usize, k: usize| theta.wedge(&o.dx(i)) + o.dxx(j, k).scale(&v);
    let rv = v.sqrt();
    let j1 = AlmostComplex::from_coframe(
        vec![(theta.scale(&rv.powi(-1)), o.dx(0).scale(&rv)), (o.dx(1).scale(&rv), o.dx(2).scale(&rv))],
        vec![0, 1, 2, 3],
    )?;
    let metric = MetricField::square(&v.powi(-1), &theta) + MetricField::diagonal(&m, &[v.clone(), v.clone(), v.clone(), o.c(0.0)]);
    Ok(HyperkahlerData {
        chart: m.clone(),
        omega1: triple(0, 1, 2),
        omega2: triple(1, 2, 0),
        omega3: triple(2, 0, 1),
        // closed only when V does not depend on x
        omega0: (vx == 0.0).then(|| theta.wedge(&o.dx(0)) - o.dxx(1, 2).scale(&v)),
        j1,
        metric,
    })
}

/// V = v0 + m/(2r) and a = −(m/2)(x/r)(y dz − z dy)/(y² + z²), with x, y, z the
/// first three coordinates of `o`.
pub(crate) fn monopole_on(o: &On, v0: f64, m: f64) -> (ScalarField, DifferentialForm) {
    let (x, y, z) = (o.x(0), o.x(1), o.x(2));
    let r = (&x * &x + &y * &y + &z * &z).sqrt();
    let v = o.c(v0) + r.powi(-1).scale(m / 2.0);
    let k = (&x / &r / (&y * &y + &z * &z)).scale(-m / 2.0);
    let a = o.one(&[(2, &k * &y), (1, -(&k * &z))]);
    (v, a)
}

/// V = v0 + eps·e^y cos z and a = x dW for W = eps·e^y sin z.
pub(crate) fn tod_on(o: &On, v0: f64, eps: f64) -> (ScalarField, DifferentialForm) {
    let (x, y, z) = (o.x(0), o.x(1), o.x(2));
    let ey = y.exp().scale(eps);
    let v = o.c(v0) + &ey * z.cos();
    // dW = V_y dz − V_z dy
    let a = o.one(&[(2, &x * &ey * z.cos()), (1, &x * &ey * z.sin())]);
    (v, a)
}

fn r3() -> On {
    On(chart("r3", &["x", "y", "z"], &[]))
}

pub fn gh_monopole(v0: f64, m: f64) -> (ScalarField, DifferentialForm) {
    monopole_on(&r3(), v0, m)
}

pub fn tod_potential(v0: f64, eps: f64) -> (ScalarField, DifferentialForm) {
    tod_on(&r3(), v0, eps)
}

/// Gibbons-Hawking triple for a single-center potential.
pub fn gibbons_hawking_monopole(v0: f64, m: f64, domain: &[(f64, f64)]) -> Result<HyperkahlerData, CatalogError> {
    let (v, a) = gh_monopole(v0, m);
    gibbons_hawking_triple(&v, &a, domain)
}

/// Triple for the x-independent potential v0 + eps·e^y cos z.
pub fn tod_triple(v0: f64, eps: f64, domain: &[(f64, f64)]) -> Result<HyperkahlerData, CatalogError> {
    let (v, a) = tod_potential(v0, eps);
    gibbons_hawking_triple(&v, &a, domain)
}
