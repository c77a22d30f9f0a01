use std::sync::Arc;

use serde::Serialize;

use super::residuals::ResidualReport;
use super::types::{G2Structure, SU3Structure, Spin7Structure};
use super::StructureError;
use crate::exterior::multi::full;
use crate::exterior::{dc, DifferentialForm, MetricField, PForm};
use crate::fields::{Chart, Embedding, FieldError, Jet2, ScalarField};

/// Data of a two-step circle reduction N⁸ → L⁷ → P⁶.
///
/// `s` and `h` live on P⁶, `xi` on L⁷, `eta` (if present) on N⁸. Fiber
/// coordinates are whichever target coordinates the embeddings miss.
#[derive(Clone, Debug)]
pub struct ReductionData {
    pub su3: SU3Structure,
    pub s: ScalarField,
    pub h: ScalarField,
    pub xi: DifferentialForm,
    pub eta: Option<DifferentialForm>,
    pub p_in_l: Arc<Embedding>,
    pub l_in_n: Option<Arc<Embedding>>,
    /// Value used for fiber coordinates when a basic form is read off on P⁶.
    pub fiber_value: f64,
}

/// Torsion quantities of the quotient SU(3)-structure, plus pointwise residuals
/// of the closure system at the sample.
#[derive(Clone, Debug)]
pub struct TorsionReport {
    pub pi1: DifferentialForm,
    pub pi2_norm: ScalarField,
    pub sigma2_norm: ScalarField,
    pub alpha_eta: DifferentialForm,
    pub alpha_xi: DifferentialForm,
    pub residuals: ResidualReport,
}

/// Scalar torsion data at one point, for reporting.
#[derive(Clone, Debug, Serialize)]
pub struct TorsionSample {
    pub point: Vec<f64>,
    pub pi1: Vec<f64>,
    pub pi2_norm: f64,
    pub sigma2_norm: f64,
}

fn invariant(identity: &str, point: &[f64], residual: f64) -> StructureError {
    StructureError::Invariant { identity: identity.into(), point: point.to_vec(), residual }
}

impl ReductionData {
    pub fn p_chart(&self) -> &Arc<Chart> {
        self.su3.chart()
    }

    pub fn l_chart(&self) -> &Arc<Chart> {
        &self.p_in_l.target
    }

    pub fn n_chart(&self) -> Option<&Arc<Chart>> {
        self.l_in_n.as_ref().map(|e| &e.target)
    }

    pub fn y_index(&self) -> usize {
        self.p_in_l.fiber_indices()[0]
    }

    pub fn x_index(&self) -> Option<usize> {
        self.l_in_n.as_ref().map(|e| e.fiber_indices()[0])
    }

    pub fn p_in_n(&self) -> Option<Arc<Embedding>> {
        self.l_in_n.as_ref().map(|e| self.p_in_l.then(e).expect("reduction embeddings compose"))
    }

    pub fn lift_l(&self, xp: &[f64]) -> Vec<f64> {
        self.p_in_l.lift_point(xp, &[self.fiber_value])
    }

    pub fn lift_n(&self, xp: &[f64]) -> Option<Vec<f64>> {
        self.p_in_n().map(|e| e.lift_point(xp, &[self.fiber_value; 2]))
    }

    /// dξ as a form on P⁶.
    pub fn d_xi(&self) -> Result<DifferentialForm, StructureError> {
        Ok(self.xi.d().restrict(&self.p_in_l, vec![self.fiber_value])?)
    }

    /// dη as a form on P⁶ (zero without a second circle).
    pub fn d_eta(&self) -> Result<DifferentialForm, StructureError> {
        match (&self.eta, self.p_in_n()) {
            (Some(eta), Some(e)) => Ok(eta.d().restrict(&e, vec![self.fiber_value; 2])?),
            _ => Ok(DifferentialForm::zero(self.p_chart(), 2)),
        }
    }

    /// dη as a form on L⁷.
    pub fn d_eta_l(&self) -> Result<DifferentialForm, StructureError> {
        match (&self.eta, &self.l_in_n) {
            (Some(eta), Some(e)) => Ok(eta.d().restrict(e, vec![self.fiber_value])?),
            _ => Ok(DifferentialForm::zero(self.l_chart(), 2)),
        }
    }

    /// Positivity of s and H, and η(X) = ξ(Y) = 1, at a P⁶ point.
    pub fn check_at(&self, xp: &[f64]) -> Result<(), StructureError> {
        let s = self.s.value_at(xp)?;
        let h = self.h.value_at(xp)?;
        if !(s > 0.0) {
            return Err(invariant("s_positive", xp, s));
        }
        if !(h > 0.0) {
            return Err(invariant("h_positive", xp, h));
        }
        let xl = self.lift_l(xp);
        let xi_y = self.xi.eval_at(&xl, 0)?.get(1 << self.y_index());
        if (xi_y - 1.0).abs() > 1e-12 {
            return Err(invariant("xi_of_y", xp, (xi_y - 1.0).abs()));
        }
        if let (Some(eta), Some(xn), Some(xi)) = (&self.eta, self.lift_n(xp), self.x_index()) {
            let v = eta.eval_at(&xn, 0)?.get(1 << xi);
            if (v - 1.0).abs() > 1e-12 {
                return Err(invariant("eta_of_x", xp, (v - 1.0).abs()));
            }
        }
        Ok(())
    }
}

fn top(p: &PForm) -> f64 {
    p.get(full(p.dim))
}

fn verify_all<F>(points: &[Vec<f64>], tol: f64, f: F) -> Result<ResidualReport, StructureError>
where
    F: Fn(&[f64]) -> Result<ResidualReport, StructureError>,
{
    let mut total = ResidualReport::new();
    for x in points {
        let r = f(x)?;
        if let Some((name, v)) = r.first_failure(tol) {
            return Err(invariant(name, x, v));
        }
        total.merge(&r);
    }
    Ok(total)
}

/// φ = ξ∧ω + H^{3/2}Ω⁺ with g_φ = H^{-2}ξ² + H g_ω on L⁷; the invariants are
/// verified at the given P⁶ points.
pub fn assemble_g2(data: &ReductionData, sample: &[Vec<f64>]) -> Result<G2Structure, StructureError> {
    let e = &data.p_in_l;
    let w = data.su3.omega.pullback(e)?;
    let op = data.su3.omega_plus.pullback(e)?;
    let h = data.h.pullback(e)?;
    let phi = data.xi.wedge(&w).try_add(&op.scale(&h.powf(1.5)))?;
    let metric = MetricField::square(&h.powi(-2), &data.xi) + data.su3.metric.pullback(e).scale(&h);
    let g2 = G2Structure::new(phi, metric)?;
    let pts: Vec<Vec<f64>> = sample.iter().map(|x| data.lift_l(x)).collect();
    verify_all(&pts, 1e-9, |x| g2.check_at(x))?;
    Ok(g2)
}

/// Φ = η∧(ξ∧ω + H^{3/2}Ω⁺) + s^{4/3}(½H²ω∧ω − H^{1/2}ξ∧Ω⁻) with
/// g_Φ = s^{-2}η² + s^{2/3}(H^{-2}ξ² + H g_ω).
pub fn assemble_spin7(data: &ReductionData, sample: &[Vec<f64>]) -> Result<Spin7Structure, StructureError> {
    let (eta, l_in_n, e) = match (&data.eta, &data.l_in_n, data.p_in_n()) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(StructureError::Precondition { name: "second circle".into(), residual: f64::INFINITY }),
    };
    let w = data.su3.omega.pullback(&e)?;
    let op = data.su3.omega_plus.pullback(&e)?;
    let om = data.su3.omega_minus.pullback(&e)?;
    let h = data.h.pullback(&e)?;
    let s = data.s.pullback(&e)?;
    let xi = data.xi.pullback(l_in_n)?;
    let first = eta.wedge(&xi.wedge(&w).try_add(&op.scale(&h.powf(1.5)))?);
    let second = w.wedge(&w).scale(&h.powi(2).scale(0.5)).try_add(&xi.wedge(&om).scale(&h.sqrt().scale(-1.0)))?;
    let phi = first.try_add(&second.scale(&s.powf(4.0 / 3.0)))?;
    let g_phi = MetricField::square(&h.powi(-2), &xi) + data.su3.metric.pullback(&e).scale(&h);
    let metric = MetricField::square(&s.powi(-2), eta) + g_phi.scale(&s.powf(2.0 / 3.0));
    let sp = Spin7Structure::new(phi, metric)?;
    let pts: Vec<Vec<f64>> = sample.iter().filter_map(|x| data.lift_n(x)).collect();
    verify_all(&pts, 1e-9, |x| sp.check_at(x))?;
    Ok(sp)
}

/// Φ = η∧φ + s^{4/3}*φ with g_Φ = s^{-2}η² + s^{2/3}g_φ, for s and φ on L⁷.
pub fn spin7_from_g2(eta: &DifferentialForm, g2: &G2Structure, s: &ScalarField, l_in_n: &Arc<Embedding>) -> Result<Spin7Structure, StructureError> {
    let phi = g2.phi.pullback(l_in_n)?;
    let sphi = g2.star_phi.pullback(l_in_n)?;
    let s = s.pullback(l_in_n)?;
    let form = eta.wedge(&phi).try_add(&sphi.scale(&s.powf(4.0 / 3.0)))?;
    let metric = MetricField::square(&s.powi(-2), eta) + g2.metric.pullback(l_in_n).scale(&s.powf(2.0 / 3.0));
    Spin7Structure::new(form, metric)
}

/// Λ²₈ part of a 2-form: ½(β + Jβ) minus its ω-component.
fn primitive_11(beta: &PForm, w: &PForm, j: &crate::exterior::JetMatrix) -> PForm {
    let b11 = beta.add(&beta.apply_j(j)).scale_f(0.5);
    let w2 = w.wedge(w);
    let r = top(&b11.wedge(&w2)) / top(&w2.wedge(w));
    b11.sub(&w.scale_f(r))
}

fn norm2(beta: &PForm, g: &crate::exterior::MetricJet) -> f64 {
    let sb = beta.star(&g.inverse, &g.sqrt_det, 1.0);
    (top(&beta.wedge(&sb)) / g.sqrt_det.value).max(0.0).sqrt()
}

/// Values at one P⁶ point of the forms the torsion system is built from.
struct TorsionInputs {
    w: PForm,
    op: PForm,
    om: PForm,
    dop: PForm,
    dom: PForm,
    dw: PForm,
    dxi: PForm,
    deta: PForm,
    s: Jet2,
    h: Jet2,
    j: crate::exterior::JetMatrix,
    g: crate::exterior::MetricJet,
}

impl TorsionInputs {
    fn at(data: &ReductionData, x: &[f64]) -> Result<Self, StructureError> {
        let su3 = &data.su3;
        let w1 = su3.omega.eval_at(x, 1)?;
        let op1 = su3.omega_plus.eval_at(x, 1)?;
        let om1 = su3.omega_minus.eval_at(x, 1)?;
        Ok(TorsionInputs {
            dw: w1.d(),
            dop: op1.d(),
            dom: om1.d(),
            w: su3.omega.eval_at(x, 0)?,
            op: su3.omega_plus.eval_at(x, 0)?,
            om: su3.omega_minus.eval_at(x, 0)?,
            dxi: data.d_xi()?.eval_at(x, 0)?,
            deta: data.d_eta()?.eval_at(x, 0)?,
            s: data.s.eval_at(x, 1)?,
            h: data.h.eval_at(x, 1)?,
            j: su3.j.eval_at(x, 0)?,
            g: su3.metric.eval_full(x, 0)?,
        })
    }

    fn one_form(&self, f: &Jet2) -> PForm {
        let n = self.w.dim;
        let mut p = PForm::zero(n, 1);
        for i in 0..n {
            p.accumulate(1 << i, f.d(i), &Jet2::constant(1.0));
        }
        p
    }
}

/// The intrinsic torsion forms of the quotient SU(3)-structure together with the
/// pointwise residuals of the closure system at the P⁶ sample points.
///
/// Residual names: `d_omega`, `condition1`, `condition2`, `condition3` (exponent
/// 1/3 on H in the dξ∧Ω⁻ term), `condition3_half` (exponent 1/2), `lemma1`,
/// `lemma2`, `alpha_eta`, `alpha_xi`.
pub fn su3_torsion(data: &ReductionData, sample: &[Vec<f64>]) -> Result<TorsionReport, StructureError> {
    let p = data.p_chart().clone();
    let s = &data.s;
    let h = &data.h;
    let pi1 = DifferentialForm::function(&(h.powf(-0.5) * s.powf(-1.0 / 3.0)).ln()).d();
    let ds = DifferentialForm::function(s).d();
    let dh = DifferentialForm::function(h).d();
    let dcs = dc(&DifferentialForm::function(s), &data.su3.j)?;
    let alpha_eta = dcs.scale(&(h.sqrt() * s.powf(1.0 / 3.0))).scale_c(-1.0);
    let alpha_xi = dh.scale(&h.sqrt()).scale_c(-1.0).try_add(&ds.scale(&(h.powf(1.5) * s.powi(-1))).scale_c(1.0 / 3.0))?;

    let norm_field = |which: u8| {
        let data = data.clone();
        ScalarField::custom(&p, move |x, _| {
            let t = TorsionInputs::at(&data, x).map_err(|e| FieldError::Other(e.to_string()))?;
            let (beta, c) = if which == 0 {
                (&t.dxi, t.h.value.powf(-1.5))
            } else {
                (&t.deta, t.s.value.powf(-4.0 / 3.0) * t.h.value.powf(-0.5))
            };
            Ok(Jet2::constant(c * norm2(&primitive_11(beta, &t.w, &t.j), &t.g)))
        })
    };

    let mut residuals = ResidualReport::new();
    for x in sample {
        let t = TorsionInputs::at(data, x)?;
        let (sv, hv) = (t.s.value, t.h.value);
        let dln_h = t.one_form(&t.h.ln());
        let dln_s = t.one_form(&t.s.ln());
        let dcln_h = dln_h.apply_j(&t.j);
        let dcln_s = dln_s.apply_j(&t.j);
        let w2 = t.w.wedge(&t.w);
        let scale = t.op.max_abs().max(1e-300);

        residuals.record("d_omega", t.dw.max_abs(), x);
        let c1 = t.dop.add(&dln_h.scale_f(1.5).wedge(&t.op)).add(&t.dxi.wedge(&t.w).scale_f(hv.powf(-1.5)));
        residuals.record("condition1", c1.max_abs() / scale, x);
        let c2 = t
            .dom
            .add(&dcln_s.scale_f(4.0 / 3.0).add(&dcln_h.scale_f(0.5)).wedge(&t.op))
            .add(&t.deta.wedge(&t.w).scale_f(sv.powf(-4.0 / 3.0) * hv.powf(-0.5)));
        residuals.record("condition2", c2.max_abs() / scale, x);
        let d_h2s = t.one_form(&(&t.h.powi(2) * &t.s.powf(4.0 / 3.0)));
        let c3_base = t.deta.wedge(&t.op).scale_f(hv.powf(1.5)).add(&d_h2s.wedge(&w2).scale_f(0.5));
        let xi_om = t.dxi.wedge(&t.om).scale_f(sv.powf(4.0 / 3.0));
        let c3_scale = c3_base.max_abs().max(xi_om.max_abs()).max(1e-300);
        residuals.record("condition3", c3_base.sub(&xi_om.scale_f(hv.powf(1.0 / 3.0))).max_abs() / c3_scale, x);
        residuals.record("condition3_half", c3_base.sub(&xi_om.scale_f(hv.powf(0.5))).max_abs() / c3_scale, x);

        let pi1v = pi1.eval_at(x, 0)?;
        let xi8 = primitive_11(&t.dxi, &t.w, &t.j);
        let eta8 = primitive_11(&t.deta, &t.w, &t.j);
        let l1 = t.dop.sub(&pi1v.wedge(&t.op)).add(&xi8.wedge(&t.w).scale_f(hv.powf(-1.5)));
        residuals.record("lemma1", l1.max_abs() / scale, x);
        let l2 = t
            .dom
            .sub(&pi1v.apply_j(&t.j).wedge(&t.op))
            .add(&eta8.wedge(&t.w).scale_f(sv.powf(-4.0 / 3.0) * hv.powf(-0.5)));
        residuals.record("lemma2", l2.max_abs() / scale, x);

        let ae = alpha_eta.eval_at(x, 0)?;
        let ax = alpha_xi.eval_at(x, 0)?;
        let re = t.deta.sub(&eta8).wedge(&t.w).sub(&ae.wedge(&t.op));
        let rx = t.dxi.sub(&xi8).wedge(&t.w).sub(&ax.wedge(&t.op));
        let ds_scale = t.s.gradient(t.w.dim).iter().chain(t.h.gradient(t.w.dim).iter()).fold(1.0f64, |a, b| a.max(b.abs()));
        residuals.record("alpha_eta", re.max_abs() / ds_scale, x);
        residuals.record("alpha_xi", rx.max_abs() / ds_scale, x);
    }

    Ok(TorsionReport { pi1, pi2_norm: norm_field(0), sigma2_norm: norm_field(1), alpha_eta, alpha_xi, residuals })
}

/// Residuals of the hypotheses of the torsion-free Spin(7) construction with
/// s = H^{3/4}: `d_xi`, `d_eta`, `closure` (of H^{3/4}Ω⁺) and `s_relation`.
pub fn spin7_prescription_check(data: &ReductionData, sample: &[Vec<f64>]) -> Result<ResidualReport, StructureError> {
    let su3 = &data.su3;
    let h32 = data.h.powf(1.5);
    let f = DifferentialForm::function(&h32);
    let rhs_xi = f.d().wedge(&su3.omega_plus).star(&su3.metric)?.scale_c(-0.5);
    let rhs_eta = dc(&f, &su3.j)?.wedge(&su3.omega_plus).star(&su3.metric)?.scale_c(-0.5);
    let closure = su3.omega_plus.scale(&data.h.powf(0.75)).d();
    let dxi = data.d_xi()?;
    let deta = data.d_eta()?;
    let mut r = ResidualReport::new();
    for x in sample {
        r.record("d_xi", dxi.eval_at(x, 0)?.max_diff(&rhs_xi.eval_at(x, 0)?), x);
        r.record("d_eta", deta.eval_at(x, 0)?.max_diff(&rhs_eta.eval_at(x, 0)?), x);
        r.record("closure", closure.eval_at(x, 0)?.max_abs(), x);
        r.record("s_relation", (data.s.value_at(x)? - data.h.value_at(x)?.powf(0.75)).abs(), x);
    }
    Ok(r)
}

/// Residuals of the hypotheses of the torsion-free G2 construction:
/// `d_xi` against −*_ω(⅔ d(H^{3/2})∧Ω⁺) and `closure` of H^{1/2}Ω⁺.
pub fn g2_prescription_check(data: &ReductionData, sample: &[Vec<f64>]) -> Result<ResidualReport, StructureError> {
    let su3 = &data.su3;
    let rhs = DifferentialForm::function(&data.h.powf(1.5)).d().wedge(&su3.omega_plus).star(&su3.metric)?.scale_c(-2.0 / 3.0);
    let closure = su3.omega_plus.scale(&data.h.sqrt()).d();
    let dxi = data.d_xi()?;
    let mut r = ResidualReport::new();
    for x in sample {
        r.record("d_xi", dxi.eval_at(x, 0)?.max_diff(&rhs.eval_at(x, 0)?), x);
        r.record("closure", closure.eval_at(x, 0)?.max_abs(), x);
    }
    Ok(r)
}

/// τ = −⅓ s^{-4/3} dη − ⅔ H^{-1}s^{-1} ξ∧d^c s on L⁷, with residuals at the P⁶
/// sample (lifted): `closure` (dφ), `defining` (d*φ − τ∧φ) and `alternative`
/// (difference from the expression through *_ω).
pub fn g2_torsion_tau(data: &ReductionData, g2: &G2Structure, sample: &[Vec<f64>]) -> Result<(DifferentialForm, ResidualReport), StructureError> {
    let tau = tau_form(data)?;
    let alt = tau_alternative(data)?;
    let dphi = g2.phi.d();
    let dstar = g2.star_phi.d();
    let mut r = ResidualReport::new();
    for xp in sample {
        let x = data.lift_l(xp);
        let t = tau.eval_at(&x, 0)?;
        let phi = g2.phi.eval_at(&x, 0)?;
        let ds = dstar.eval_at(&x, 0)?;
        let scale = ds.max_abs().max(t.max_abs()).max(1.0);
        r.record("closure", dphi.eval_at(&x, 0)?.max_abs(), xp);
        r.record("defining", ds.max_diff(&t.wedge(&phi)) / scale, xp);
        r.record("alternative", t.max_diff(&alt.eval_at(&x, 0)?), xp);
    }
    Ok((tau, r))
}

fn tau_form(data: &ReductionData) -> Result<DifferentialForm, StructureError> {
    let e = &data.p_in_l;
    let s = data.s.pullback(e)?;
    let h = data.h.pullback(e)?;
    let dcs = dc(&DifferentialForm::function(&data.s), &data.su3.j)?.pullback(e)?;
    let a = data.d_eta_l()?.scale(&s.powf(-4.0 / 3.0)).scale_c(-1.0 / 3.0);
    let b = data.xi.wedge(&dcs).scale(&(h.powi(-1) * s.powi(-1))).scale_c(-2.0 / 3.0);
    Ok(a.try_add(&b)?)
}

/// *_ω(⅓H^{1/2}s^{-1} d^c s∧Ω⁺) − ⅔H^{-1}s^{-1} ξ∧d^c s on L⁷.
pub fn tau_alternative(data: &ReductionData) -> Result<DifferentialForm, StructureError> {
    let su3 = &data.su3;
    let e = &data.p_in_l;
    let dcs = dc(&DifferentialForm::function(&data.s), &su3.j)?;
    let coef = data.h.sqrt() * data.s.powi(-1);
    let first = dcs.wedge(&su3.omega_plus).star(&su3.metric)?.scale(&coef).scale_c(1.0 / 3.0).pullback(e)?;
    let s = data.s.pullback(e)?;
    let h = data.h.pullback(e)?;
    let second = data.xi.wedge(&dcs.pullback(e)?).scale(&(h.powi(-1) * s.powi(-1))).scale_c(-2.0 / 3.0);
    Ok(first.try_add(&second)?)
}
