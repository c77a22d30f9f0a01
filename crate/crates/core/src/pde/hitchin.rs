use crate::catalog::StructureBundle;
use crate::exterior::multi::full;
use crate::exterior::{DifferentialForm, VectorField};
use crate::structures::ResidualReport;

use super::PdeError;

/// Φ = dt∧ψ + χ with ψ = ι_{∂t}Φ and χ free of dt, for the foliation coordinate t.
#[derive(Clone, Debug)]
pub struct HitchinSplit {
    pub t_index: usize,
    pub psi: DifferentialForm,
    pub chi: DifferentialForm,
}

pub fn hitchin_split(bundle: &StructureBundle) -> Result<HitchinSplit, PdeError> {
    let sp = bundle.structure.as_spin7().ok_or_else(|| PdeError::Config(format!("{} is not a Spin(7) entry", bundle.name)))?;
    let t = bundle.foliation_coordinate.ok_or_else(|| PdeError::Config(format!("{} declares no foliation coordinate", bundle.name)))?;
    let psi = sp.phi.interior(&VectorField::coordinate(&bundle.chart, t))?;
    let chi = &sp.phi - &DifferentialForm::dx(&bundle.chart, t).wedge(&psi);
    Ok(HitchinSplit { t_index: t, psi, chi })
}

/// Residuals of the Hitchin system along the foliation, at chart points.
///
/// With lapse N = (g^{tt})^{-1/2} the geodesic parameter τ has dτ = N dt, the
/// evolving G2 form is φ_τ = ψ/N and *φ_τ φ_τ = χ. Recorded:
/// `hit1` = |d_L χ|, `hit2` = |N⁻¹∂_t χ − d_L(ψ/N)| (relative to |N⁻¹∂_t χ| when
/// that exceeds 1), `shift` = max_i |g^{ti}|/g^{tt} over i ≠ t and
/// `lapse_gradient` = |d_L N|/N. The split is that of the Hitchin flow only when
/// the last two vanish.
pub fn hitchin_check(bundle: &StructureBundle, points: &[Vec<f64>]) -> Result<ResidualReport, PdeError> {
    let split = hitchin_split(bundle)?;
    let t = split.t_index;
    let n = bundle.chart.dim();
    let along_l = full(n) & !(1u32 << t);
    let metric = bundle.metric();
    let mut r = ResidualReport::new();
    for x in points {
        let gj = metric.eval_full(x, 1)?;
        let gtt = gj.inverse.get(t, t).clone();
        let lapse_inv = gtt.sqrt();
        let lapse = lapse_inv.recip();
        let chi = split.chi.eval_at(x, 1)?;
        let psi = split.psi.eval_at(x, 1)?;
        let dchi = chi.d_along(along_l);
        let dtau_chi = chi.partial(t).scale(&lapse_inv);
        let phi_tau = psi.scale(&lapse_inv);
        let rhs = phi_tau.d_along(along_l);
        let scale = dtau_chi.max_abs().max(1.0);
        r.record("hit1", dchi.max_abs() / chi.max_abs().max(1.0), x);
        r.record("hit2", dtau_chi.max_diff(&rhs) / scale, x);
        let shift = (0..n).filter(|&i| i != t).map(|i| gj.inverse.get(t, i).value.abs()).fold(0.0, f64::max) / gtt.value;
        r.record("shift", shift, x);
        let grad = (0..n).filter(|&i| i != t).map(|i| lapse.d(i).abs()).fold(0.0, f64::max) / lapse.value;
        r.record("lapse_gradient", grad, x);
    }
    Ok(r)
}
