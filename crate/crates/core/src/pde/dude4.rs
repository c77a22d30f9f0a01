use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{rk4_step, Stencil, REPORT_SCHEMA};
use super::{EvolutionReport, GridField, PdeError};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dude4Config {
    pub y_range: (f64, f64),
    pub steps: usize,
}

/// Hodge Laplacian −(∂²₁ + ∂²₂) at every point.
fn laplacian(st: &Stencil, v: &[f64]) -> Vec<f64> {
    (0..v.len()).into_par_iter().map(|k| -(st.second(v, k, 0, 0) + st.second(v, k, 1, 1))).collect()
}

/// RK4 in y for G ∂²_y ũ = y Δ_Σ ũ on a periodic 2-grid over Σ, where Δ_Σ is the
/// (non-negative) Hodge Laplacian. u = yũ must stay positive.
pub fn evolve_dude4(u0: &GridField, u1: &GridField, g: &GridField, cfg: &Dude4Config) -> Result<EvolutionReport, PdeError> {
    for f in [u0, u1, g] {
        f.validate()?;
    }
    if u0.dim() != 2 || !u0.same_layout(u1) || !u0.same_layout(g) {
        return Err(PdeError::Config("ũ0, ũ1 and G must share one periodic 2-grid".into()));
    }
    let (y0, y1) = cfg.y_range;
    if !(y0.is_finite() && y1.is_finite() && y1 > y0 && y0 > 0.0) || cfg.steps == 0 {
        return Err(PdeError::Config("need 0 < y0 < y1 and steps > 0".into()));
    }
    let st = Stencil::new(u0)?;
    if let Some(k) = g.values.iter().position(|v| !(*v > 0.0)) {
        return Err(PdeError::Config(format!("G must be positive (index {:?})", g.unravel(k))));
    }
    let g_constant = g.values.iter().all(|v| *v == g.values[0]);
    let harm = laplacian(&st, &g.values).iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if !g_constant && harm >= 1e-8 {
        return Err(PdeError::Config(format!("G is not discretely harmonic (residual {harm:e})")));
    }
    let check_positive = |step: usize, y: f64, v: &[f64]| -> Result<(), PdeError> {
        match v.iter().position(|x| !(y * x > 0.0)) {
            Some(k) => Err(PdeError::Validity { step, index: u0.unravel(k) }),
            None => Ok(()),
        }
    };
    check_positive(0, y0, &u0.values)?;
    let rhs = |y: f64, v: &[f64], out: &mut [f64]| -> Result<(), PdeError> {
        let lap = laplacian(&st, v);
        out.iter_mut().zip(lap.iter().zip(&g.values)).for_each(|(o, (l, gv))| *o = y * l / gv);
        Ok(())
    };
    let dy = (y1 - y0) / cfg.steps as f64;
    let mut f = u0.values.clone();
    let mut r = u1.values.clone();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let weighted = |v: &[f64]| v.iter().zip(&g.values).map(|(a, b)| a * b).sum::<f64>() / v.len() as f64;
    let rate_mean0 = weighted(&r);
    let mut residuals = Vec::with_capacity(cfg.steps);
    let mut prev: Option<Vec<f64>> = None;
    for step in 0..cfg.steps {
        let y = y0 + step as f64 * dy;
        let (nf, nr) = rk4_step(y, dy, &f, &r, &rhs)?;
        check_positive(step + 1, y + dy, &nf)?;
        if let Some(p) = &prev {
            let mut a = vec![0.0; f.len()];
            rhs(y, &f, &mut a)?;
            residuals.push((0..f.len()).map(|k| ((nf[k] - 2.0 * f[k] + p[k]) / (dy * dy) - a[k]).abs()).fold(0.0, f64::max));
        }
        prev = Some(std::mem::replace(&mut f, nf));
        r = nr;
    }
    let mut diag = BTreeMap::new();
    // Σ G ∂_y ũ is constant in y: the Laplacian sums to zero on a torus.
    diag.insert("weighted_rate_drift".to_string(), (weighted(&r) - rate_mean0).abs());
    diag.insert("mean_final".to_string(), mean(&f));
    diag.insert("discrete_harmonicity_of_g".to_string(), harm);
    Ok(EvolutionReport {
        schema_version: REPORT_SCHEMA,
        steps: cfg.steps,
        dt: dy,
        max_residual_per_step: residuals,
        conserved_diagnostics: diag,
        final_field: u0.with_values(f, y1),
        final_rate: u0.with_values(r, y1),
    })
}
