use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{rk4_step, Stencil, REPORT_SCHEMA};
use super::{EvolutionReport, GridField, PdeError};

/// Evolution of F(s, z) under F̈ = 4s(s+c)·det(∂²F/∂z_i∂z̄_j) on a periodic grid in
/// (x1, x2, x3, x4), z1 = x1 + ix2, z2 = x3 + ix4.
///
/// A torus carries no global strictly pluri(sub/super)harmonic function, so F is
/// split as a background with constant diagonal complex Hessian
/// diag(β1(s), β2(s)), β_j(s) = b0_j + s·b1_j, plus a periodic part φ stored on the
/// grid. The background is linear in s and drops out of F̈.
///
/// With d^c = J∘d and J dx1 = −dx2, the Kähler form is ω̃1 = ¼dd^cF and u = ¼F̈,
/// so positivity of ω̃1 means −∂²F/∂z_i∂z̄_j is positive definite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MongeAmpereConfig {
    pub c: f64,
    pub s_range: (f64, f64),
    pub steps: usize,
    /// [[b0_1, b1_1], [b0_2, b1_2]].
    pub background: [[f64; 2]; 2],
}

impl MongeAmpereConfig {
    fn beta(&self, s: f64) -> [f64; 2] {
        [self.background[0][0] + s * self.background[0][1], self.background[1][0] + s * self.background[1][1]]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MongeAmpereOutcome {
    pub report: EvolutionReport,
    /// ¼F̈ at the final s, including the spatially constant part removed by the gauge.
    pub u_final: GridField,
}

/// Complex Hessian entries (h11, h22, Re h12, Im h12) of the periodic part at `k`.
fn complex_hessian(st: &Stencil, v: &[f64], k: usize) -> [f64; 4] {
    let d = |a, b| st.second(v, k, a, b);
    [
        0.25 * (d(0, 0) + d(1, 1)),
        0.25 * (d(2, 2) + d(3, 3)),
        0.25 * (d(0, 2) + d(1, 3)),
        0.25 * (d(0, 3) - d(1, 2)),
    ]
}

/// (det, positivity margin) of the full complex Hessian diag(β) + H(φ). The margin is
/// min(−h11, det) and must stay positive.
fn det_and_margin(beta: [f64; 2], h: [f64; 4]) -> (f64, f64) {
    let a = beta[0] + h[0];
    let b = beta[1] + h[1];
    let det = a * b - (h[2] * h[2] + h[3] * h[3]);
    (det, (-a).min(det))
}

fn check_inputs(f0: &GridField, f1: &GridField, cfg: &MongeAmpereConfig) -> Result<(), PdeError> {
    f0.validate()?;
    f1.validate()?;
    if f0.dim() != 4 || !f0.same_layout(f1) {
        return Err(PdeError::Config("F0 and F1 must share one periodic 4-grid".into()));
    }
    let (s0, s1) = cfg.s_range;
    if !(s0.is_finite() && s1.is_finite() && s1 > s0 && s0 > 0.0) || cfg.steps == 0 {
        return Err(PdeError::Config("need 0 < s0 < s1 and steps > 0".into()));
    }
    if s0 + cfg.c <= 0.0 {
        return Err(PdeError::Config("s + c must stay positive".into()));
    }
    if cfg.background.iter().flatten().any(|b| !b.is_finite()) {
        return Err(PdeError::Config("non-finite background".into()));
    }
    Ok(())
}

/// Full right-hand side 4s(s+c)det at every grid point, plus the minimal margin and
/// its location.
fn rhs_full(st: &Stencil, cfg: &MongeAmpereConfig, s: f64, v: &[f64]) -> (Vec<f64>, f64, usize) {
    let beta = cfg.beta(s);
    let k = 4.0 * s * (s + cfg.c);
    let out: Vec<(f64, f64)> = (0..v.len())
        .into_par_iter()
        .map(|i| {
            let (det, margin) = det_and_margin(beta, complex_hessian(st, v, i));
            (k * det, margin)
        })
        .collect();
    let (mut worst, mut at) = (f64::INFINITY, 0);
    for (i, (_, m)) in out.iter().enumerate() {
        if *m < worst {
            worst = *m;
            at = i;
        }
    }
    (out.into_iter().map(|(r, _)| r).collect(), worst, at)
}

fn subtract_mean(v: &mut [f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
    m
}

/// RK4 in s for (φ, φ̇) with centered second-order differences. The grid mean of φ
/// and φ̇ is removed each step, which fixes the affine gauge of F.
pub fn evolve_monge_ampere(f0: &GridField, f1: &GridField, cfg: &MongeAmpereConfig) -> Result<MongeAmpereOutcome, PdeError> {
    check_inputs(f0, f1, cfg)?;
    let st = Stencil::new(f0)?;
    let (s0, s1) = cfg.s_range;
    let dt = (s1 - s0) / cfg.steps as f64;
    let mut phi = f0.values.clone();
    let mut rate = f1.values.clone();
    subtract_mean(&mut phi);
    subtract_mean(&mut rate);
    let (_, margin0, at0) = rhs_full(&st, cfg, s0, &phi);
    if margin0 <= 0.0 {
        return Err(PdeError::Positivity { step: 0, index: f0.unravel(at0) });
    }
    let rhs = |s: f64, v: &[f64], out: &mut [f64]| -> Result<(), PdeError> {
        let (r, _, _) = rhs_full(&st, cfg, s, v);
        let m = r.iter().sum::<f64>() / r.len() as f64;
        out.iter_mut().zip(&r).for_each(|(o, x)| *o = x - m);
        Ok(())
    };
    let mut residuals = Vec::with_capacity(cfg.steps);
    let mut prev: Option<Vec<f64>> = None;
    let mut min_margin = margin0;
    for step in 0..cfg.steps {
        let s = s0 + step as f64 * dt;
        let s_next = s + dt;
        if let Some(h) = st.min_spacing() {
            let bound = 0.25 * h * h * (1.0f64).min(1.0 / (s_next * (s_next + cfg.c)));
            if dt > bound {
                return Err(PdeError::Cfl { step, dt, bound });
            }
        }
        let (mut nphi, mut nrate) = rk4_step(s, dt, &phi, &rate, &rhs)?;
        subtract_mean(&mut nphi);
        subtract_mean(&mut nrate);
        if let Some(p) = &prev {
            // second difference in s against the equation at the middle level
            let mut r = vec![0.0; phi.len()];
            rhs(s, &phi, &mut r)?;
            let res = (0..phi.len()).map(|k| ((nphi[k] - 2.0 * phi[k] + p[k]) / (dt * dt) - r[k]).abs()).fold(0.0, f64::max);
            residuals.push(res);
        }
        let (_, margin, at) = rhs_full(&st, cfg, s_next, &nphi);
        if !(margin > 0.0) {
            return Err(PdeError::Positivity { step: step + 1, index: f0.unravel(at) });
        }
        min_margin = min_margin.min(margin);
        prev = Some(std::mem::replace(&mut phi, nphi));
        rate = nrate;
    }
    let (full, _, _) = rhs_full(&st, cfg, s1, &phi);
    let u: Vec<f64> = full.iter().map(|x| 0.25 * x).collect();
    let mut diag = BTreeMap::new();
    diag.insert("min_positivity_margin".to_string(), min_margin);
    diag.insert("mean_u_final".to_string(), u.iter().sum::<f64>() / u.len() as f64);
    diag.insert("mean_phi_final".to_string(), phi.iter().sum::<f64>() / phi.len() as f64);
    let report = EvolutionReport {
        schema_version: REPORT_SCHEMA,
        steps: cfg.steps,
        dt,
        max_residual_per_step: residuals,
        conserved_diagnostics: diag,
        final_field: f0.with_values(phi, s1),
        final_rate: f0.with_values(rate, s1),
    };
    Ok(MongeAmpereOutcome { u_final: f0.with_values(u, s1), report })
}

/// ω̃1 = ¼dd^cF on the grid for F = background(s) + φ, as coefficients of
/// (dx12, dx13, dx14, dx23, dx24, dx34).
pub fn kahler_form_on_grid(phi: &GridField, cfg: &MongeAmpereConfig, s: f64) -> Result<Vec<[f64; 6]>, PdeError> {
    let st = Stencil::new(phi)?;
    let beta = cfg.beta(s);
    // J dx_i = Σ_k m[i][k] dx_k
    let m = [[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0]];
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    Ok((0..phi.len())
        .into_par_iter()
        .map(|k| {
            let mut hess = [[0.0; 4]; 4];
            for (a, row) in hess.iter_mut().enumerate() {
                for (b, e) in row.iter_mut().enumerate() {
                    *e = st.second(&phi.values, k, a, b);
                }
            }
            // background β|z|² has real Hessian 2β on the matching pair
            for (j, b) in beta.iter().enumerate() {
                hess[2 * j][2 * j] += 2.0 * b;
                hess[2 * j + 1][2 * j + 1] += 2.0 * b;
            }
            let mut out = [0.0; 6];
            for (o, &(j, l)) in out.iter_mut().zip(&pairs) {
                *o = 0.25 * (0..4).map(|i| hess[i][j] * m[i][l] - hess[i][l] * m[i][j]).sum::<f64>();
            }
            out
        })
        .collect())
}
