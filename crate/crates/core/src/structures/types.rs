use std::sync::Arc;

use super::residuals::ResidualReport;
use super::StructureError;
use crate::exterior::{AlmostComplex, DifferentialForm, ExteriorError, JetMatrix, MetricField, PForm};
use crate::exterior::multi::full;
use crate::fields::{Chart, Jet2};

fn check_dim(chart: &Arc<Chart>, n: usize) -> Result<(), StructureError> {
    if chart.dim() != n {
        return Err(crate::fields::FieldError::DimensionMismatch { expected: n, got: chart.dim() }.into());
    }
    Ok(())
}

fn top(p: &PForm) -> f64 {
    p.get(full(p.dim))
}

fn basis_vec(n: usize, k: usize) -> Vec<Jet2> {
    (0..n).map(|i| Jet2::constant(if i == k { 1.0 } else { 0.0 })).collect()
}

/// Contraction test for a complex form Re + i·Im of type (p,0): ι_{JX}Re = −ι_X Im and
/// ι_{JX}Im = ι_X Re for every basis vector X.
pub fn type_residual(re: &PForm, im: &PForm, j: &JetMatrix) -> f64 {
    let n = re.dim;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let x = basis_vec(n, k);
        let jx: Vec<Jet2> = (0..n).map(|i| Jet2::constant(j.get(i, k).value)).collect();
        let a = re.interior(&jx).add(&im.interior(&x));
        let b = im.interior(&jx).sub(&re.interior(&x));
        worst = worst.max(a.max_abs()).max(b.max_abs());
    }
    worst
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct SU3Structure {
    pub omega: DifferentialForm,
    pub omega_plus: DifferentialForm,
    pub omega_minus: DifferentialForm,
    pub j: AlmostComplex,
    pub metric: MetricField,
}

impl SU3Structure {
    /// g(X, Y) = ω(X, JY), oriented by ω³.
    pub fn new(omega: DifferentialForm, omega_plus: DifferentialForm, omega_minus: DifferentialForm, j: AlmostComplex) -> Result<Self, StructureError> {
        check_dim(omega.chart(), 6)?;
        if omega.degree() != 2 || omega_plus.degree() != 3 || omega_minus.degree() != 3 {
            return Err(ExteriorError::Degree("SU(3) data needs a 2-form and two 3-forms".into()).into());
        }
        let vol = omega.wedge(&omega).wedge(&omega);
        let metric = MetricField::hermitian(&omega, &j).oriented_by(&vol);
        Ok(SU3Structure { omega, omega_plus, omega_minus, j, metric })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.omega.chart()
    }

    pub fn check_at(&self, x: &[f64]) -> Result<ResidualReport, StructureError> {
        let mut r = ResidualReport::new();
        let w = self.omega.eval_at(x, 0)?;
        let p = self.omega_plus.eval_at(x, 0)?;
        let m = self.omega_minus.eval_at(x, 0)?;
        let j = self.j.eval_at(x, 0)?;
        r.record("j_square", self.j.square_residual(x)?, x);
        let w3 = w.wedge(&w).wedge(&w);
        r.record("compatibility", (top(&w3) * 2.0 / 3.0 - top(&p.wedge(&m))).abs(), x);
        r.record("omega_wedge_re", w.wedge(&p).max_abs(), x);
        r.record("omega_wedge_im", w.wedge(&m).max_abs(), x);
        r.record("omega_j_invariant", w.apply_j(&j).max_diff(&w), x);
        r.record("type_30", type_residual(&p, &m, &j), x);
        let gj = self.metric.eval_full(x, 0)?;
        r.record("volume", (top(&w3).abs() / 6.0 - gj.sqrt_det.value).abs(), x);
        Ok(r)
    }
}

#[derive(Clone, Debug)]
pub struct G2Structure {
    pub phi: DifferentialForm,
    pub metric: MetricField,
    pub star_phi: DifferentialForm,
}

/// Metric and orientation sign determined by a 3-form's values through
/// (ι_u φ)∧(ι_v φ)∧φ = 6 g(u,v) vol_g.
pub fn g2_metric_from_values(phi: &PForm) -> Result<(Vec<f64>, f64), StructureError> {
    let n = 7;
    let iota: Vec<PForm> = (0..n).map(|k| phi.interior(&basis_vec(n, k))).collect();
    let mut b = nalgebra::DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        for v in u..n {
            let c = top(&iota[u].wedge(&iota[v]).wedge(phi)) / 6.0;
            b[(u, v)] = c;
            b[(v, u)] = c;
        }
    }
    let det = b.determinant();
    if det.abs() < 1e-300 {
        return Err(StructureError::Invariant { identity: "g2_nondegenerate".into(), point: vec![], residual: det });
    }
    let root = det.signum() * det.abs().powf(1.0 / 9.0);
    Ok(((b / root).as_slice().to_vec(), det.signum()))
}

impl G2Structure {
    /// Metric supplied explicitly; orientation taken from (ι_vφ)²∧φ.
    pub fn new(phi: DifferentialForm, metric: MetricField) -> Result<Self, StructureError> {
        check_dim(phi.chart(), 7)?;
        if phi.degree() != 3 {
            return Err(ExteriorError::Degree("G2 form must be a 3-form".into()).into());
        }
        let chart = phi.chart().clone();
        // The Gram form of any direction orients; pick the one with the largest response.
        let v = (0..7).map(|k| crate::exterior::VectorField::coordinate(&chart, k)).collect::<Vec<_>>();
        let mut vol = DifferentialForm::zero(&chart, 7);
        for vk in &v {
            let i = phi.interior(vk)?;
            vol = vol.try_add(&i.wedge(&i).wedge(&phi))?;
        }
        let metric = metric.oriented_by(&vol);
        let star_phi = phi.star(&metric)?;
        Ok(G2Structure { phi, metric, star_phi })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.phi.chart()
    }

    pub fn check_at(&self, x: &[f64]) -> Result<ResidualReport, StructureError> {
        let mut r = ResidualReport::new();
        let p = self.phi.eval_at(x, 0)?;
        let gj = self.metric.eval_full(x, 0)?;
        let o = self.metric.orientation_at(x)?;
        let sp = self.star_phi.eval_at(x, 0)?;
        let scale = gj.sqrt_det.value;
        r.record("phi_wedge_star_phi", (top(&p.wedge(&sp)) * o - 7.0 * scale).abs() / scale, x);
        let (gb, _) = g2_metric_from_values(&p)?;
        let g = gj.g.values();
        let gmax = g.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        r.record("metric_from_phi", max_abs_diff(&g, &gb) / gmax, x);
        Ok(r)
    }
}

#[derive(Clone, Debug)]
pub struct Spin7Structure {
    pub phi: DifferentialForm,
    pub metric: MetricField,
}

impl Spin7Structure {
    /// Orientation taken from Φ∧Φ.
    pub fn new(phi: DifferentialForm, metric: MetricField) -> Result<Self, StructureError> {
        check_dim(phi.chart(), 8)?;
        if phi.degree() != 4 {
            return Err(ExteriorError::Degree("Spin(7) form must be a 4-form".into()).into());
        }
        let metric = metric.oriented_by(&phi.wedge(&phi));
        Ok(Spin7Structure { phi, metric })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.phi.chart()
    }

    pub fn check_at(&self, x: &[f64]) -> Result<ResidualReport, StructureError> {
        let mut r = ResidualReport::new();
        let p = self.phi.eval_at(x, 0)?;
        let gj = self.metric.eval_full(x, 0)?;
        let o = self.metric.orientation_at(x)?;
        let sp = p.star(&gj.inverse, &gj.sqrt_det, o);
        let pmax = p.max_abs().max(1e-300);
        r.record("self_duality", sp.max_diff(&p) / pmax, x);
        let vol = gj.sqrt_det.value;
        r.record("phi_wedge_phi", (top(&p.wedge(&p)) * o - 14.0 * vol).abs() / vol, x);
        Ok(r)
    }
}

/// Calabi-Yau 4-fold data: Kähler form, complex volume form, J and metric.
#[derive(Clone, Debug)]
pub struct SU4Structure {
    pub omega: DifferentialForm,
    pub omega_re: DifferentialForm,
    pub omega_im: DifferentialForm,
    pub j: AlmostComplex,
    pub metric: MetricField,
}

impl SU4Structure {
    pub fn new(omega: DifferentialForm, omega_re: DifferentialForm, omega_im: DifferentialForm, j: AlmostComplex) -> Result<Self, StructureError> {
        check_dim(omega.chart(), 8)?;
        if omega.degree() != 2 || omega_re.degree() != 4 || omega_im.degree() != 4 {
            return Err(ExteriorError::Degree("SU(4) data needs a 2-form and two 4-forms".into()).into());
        }
        let w2 = omega.wedge(&omega);
        let metric = MetricField::hermitian(&omega, &j).oriented_by(&w2.wedge(&w2));
        Ok(SU4Structure { omega, omega_re, omega_im, j, metric })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.omega.chart()
    }

    /// Spin(7) form ½ω² + ReΩ with the Kähler metric.
    pub fn spin7(&self) -> Result<Spin7Structure, StructureError> {
        let phi = self.omega.wedge(&self.omega).scale_c(0.5).try_add(&self.omega_re)?;
        Spin7Structure::new(phi, self.metric.clone())
    }

    pub fn check_at(&self, x: &[f64]) -> Result<ResidualReport, StructureError> {
        let mut r = ResidualReport::new();
        let w = self.omega.eval_at(x, 1)?;
        let re = self.omega_re.eval_at(x, 1)?;
        let im = self.omega_im.eval_at(x, 1)?;
        let j = self.j.eval_at(x, 0)?;
        r.record("j_square", self.j.square_residual(x)?, x);
        r.record("d_omega", w.d().max_abs(), x);
        r.record("d_omega_re", re.d().max_abs(), x);
        r.record("d_omega_im", im.d().max_abs(), x);
        r.record("omega_j_invariant", w.apply_j(&j).max_diff(&w), x);
        r.record("type_40", type_residual(&re, &im, &j), x);
        r.record("omega_wedge_re", w.wedge(&re).max_abs(), x);
        let w4 = top(&w.wedge(&w).wedge(&w).wedge(&w));
        // ω⁴/4! = ⅛ Re∧Re, which makes ½ω² + ReΩ satisfy Φ∧Φ = 14 vol.
        r.record("normalization", (w4 / 24.0 - top(&re.wedge(&re)) / 8.0).abs() / (w4.abs() / 24.0), x);
        Ok(r)
    }
}


/// Real and imaginary parts of (a₁ + i b₁)∧…∧(a_k + i b_k).
pub fn complex_product(factors: &[(DifferentialForm, DifferentialForm)]) -> Result<(DifferentialForm, DifferentialForm), StructureError> {
    let (mut re, mut im) = factors[0].clone();
    for (a, b) in &factors[1..] {
        let nre = re.wedge(a).try_add(&im.wedge(b).scale_c(-1.0))?;
        let nim = re.wedge(b).try_add(&im.wedge(a))?;
        re = nre;
        im = nim;
    }
    Ok((re, im))
}
