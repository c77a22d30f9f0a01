//! Grid-refinement studies of the evolvers against closed-form solutions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{evolve_dude4, evolve_monge_ampere, kahler_form_on_grid, Dude4Config, EvolutionReport, GridField, MongeAmpereConfig, PdeError};
use crate::specialfns::{airy_ai, pcf_u0};

/// Errors below this are round-off; no order is reported for them.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub steps: usize,
    pub error: f64,
    /// log2 of the error ratio against the previous row.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceStudy {
    pub case: String,
    pub rows: Vec<ConvergenceRow>,
    /// Report of the finest run.
    pub finest: Option<EvolutionReport>,
}

impl ConvergenceStudy {
    fn push(&mut self, n: usize, h: f64, steps: usize, error: f64) {
        let order = self.rows.last().and_then(|p| {
            (p.error > ROUNDOFF_FLOOR && error > ROUNDOFF_FLOOR).then(|| (p.error / error).ln() / (p.h / h).ln())
        });
        self.rows.push(ConvergenceRow { n, h, steps, error, order });
    }

    /// Orders between consecutive rows; None where an error is at round-off.
    pub fn orders(&self) -> Vec<Option<f64>> {
        self.rows.iter().skip(1).map(|r| r.order).collect()
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.error).fold(0.0, f64::max)
    }

    pub fn table(&self) -> String {
        let mut s = format!("{}\n{:>6} {:>12} {:>7} {:>14} {:>8}\n", self.case, "n", "h", "steps", "error", "order");
        for r in &self.rows {
            let o = r.order.map_or_else(|| "-".to_string(), |o| format!("{o:.3}"));
            s.push_str(&format!("{:>6} {:>12.6e} {:>7} {:>14.6e} {:>8}\n", r.n, r.h, r.steps, r.error, o));
        }
        s
    }
}

/// Closed-form Monge-Ampère cases.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum MaCase {
    /// ω̃1 = (a+bs)ω0 + (p+qs)ω1 over flat ℝ⁴ with A = 1, on the unit torus.
    #[serde(rename = "constant_I")]
    ConstantI { a: f64, b: f64, p: f64, q: f64, c: f64, s_range: (f64, f64) },
    /// ω̃1 = σ1 + v(s) sin x1 dx12 and u = s²(1 + v sin x1), x1 of period 2π.
    #[serde(rename = "perturbed_glps")]
    Perturbed { s_range: (f64, f64) },
}

/// Smallest step count that meets dt ≤ 0.9 · 0.25h²·min(1, 1/(s(s+c))) over the range.
fn cfl_steps(h: f64, c: f64, s_range: (f64, f64), at_least: usize) -> usize {
    let worst = [s_range.0, s_range.1].iter().map(|s| s * (s + c)).fold(1.0f64, f64::max);
    let bound = 0.9 * 0.25 * h * h / worst;
    (((s_range.1 - s_range.0) / bound).ceil() as usize).max(at_least)
}

pub fn monge_ampere_study(case: &MaCase, resolutions: &[usize], min_steps: usize) -> Result<ConvergenceStudy, PdeError> {
    let name = match case {
        MaCase::ConstantI { .. } => "monge_ampere constant_I",
        MaCase::Perturbed { .. } => "monge_ampere perturbed_glps",
    };
    let mut st = ConvergenceStudy { case: name.into(), rows: vec![], finest: None };
    for &n in resolutions {
        if n < 3 {
            return Err(PdeError::Config("resolutions must be at least 3".into()));
        }
        let (err, steps, h, report) = match *case {
            MaCase::ConstantI { a, b, p, q, c, s_range } => {
                let h = 1.0 / n as f64;
                let m = n.min(16);
                let k1 = [a + p, b + q];
                let k2 = [p - a, q - b];
                let steps = cfl_steps(h, c, s_range, min_steps);
                let cfg = MongeAmpereConfig { c, s_range, steps, background: [[-k1[0], -k1[1]], [-k2[0], -k2[1]]] };
                let zero = GridField::periodic_from_fn(&[n, n, m, m], &[h, h, 1.0 / m as f64, 1.0 / m as f64], s_range.0, |_| 0.0)?;
                let out = evolve_monge_ampere(&zero, &zero, &cfg)?;
                let s1 = s_range.1;
                let (e1, e2) = (k1[0] + k1[1] * s1, k2[0] + k2[1] * s1);
                let exact = [e1, 0.0, 0.0, 0.0, 0.0, e2];
                let u = s1 * (s1 + c) * e1 * e2;
                let w = kahler_form_on_grid(&out.report.final_field, &cfg, s1)?;
                let mut err: f64 = 0.0;
                for (k, wk) in w.iter().enumerate() {
                    for (x, y) in wk.iter().zip(&exact) {
                        err = err.max((x - y).abs());
                    }
                    err = err.max((out.u_final.values[k] - u).abs());
                }
                (err, steps, h, out.report)
            }
            MaCase::Perturbed { s_range } => {
                let h = 2.0 * PI / n as f64;
                let steps = cfl_steps(h, 0.0, s_range, min_steps);
                let (s0, s1) = s_range;
                let v0 = pcf_u0(s0).map_err(|e| PdeError::Config(e.to_string()))?;
                let v1 = pcf_u0(s1).map_err(|e| PdeError::Config(e.to_string()))?[0];
                let shape = [n, 1, 1, 1];
                let sp = [h, 1.0, 1.0, 1.0];
                // F = −|z|² + 4v(s) sin x1
                let f0 = GridField::periodic_from_fn(&shape, &sp, s0, |x| 4.0 * v0[0] * x[0].sin())?;
                let f1 = GridField::periodic_from_fn(&shape, &sp, s0, |x| 4.0 * v0[1] * x[0].sin())?;
                let cfg = MongeAmpereConfig { c: 0.0, s_range, steps, background: [[-1.0, 0.0], [-1.0, 0.0]] };
                let out = evolve_monge_ampere(&f0, &f1, &cfg)?;
                let w = kahler_form_on_grid(&out.report.final_field, &cfg, s1)?;
                let mut err: f64 = 0.0;
                for (k, wk) in w.iter().enumerate() {
                    let f = 1.0 + v1 * out.report.final_field.coords(k)[0].sin();
                    let exact = [f, 0.0, 0.0, 0.0, 0.0, 1.0];
                    for (x, y) in wk.iter().zip(&exact) {
                        err = err.max((x - y).abs());
                    }
                    err = err.max((out.u_final.values[k] - s1 * s1 * f).abs());
                }
                (err, steps, h, out.report)
            }
        };
        st.push(n, h, steps, err);
        st.finest = Some(report);
    }
    Ok(st)
}

/// Closed-form cases of the curve equation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum Dude4Case {
    /// ũ = p + qy with constant G, on the unit torus.
    #[serde(rename = "affine")]
    Affine { p: f64, q: f64, g: f64, y_range: (f64, f64) },
    /// ũ = 1 + Ai(y) sin x1 with G ≡ 1, x1 of period 2π.
    #[serde(rename = "airy")]
    Airy { y_range: (f64, f64) },
}

pub fn dude4_study(case: &Dude4Case, resolutions: &[usize], steps: usize) -> Result<ConvergenceStudy, PdeError> {
    let name = match case {
        Dude4Case::Affine { .. } => "dude4 affine",
        Dude4Case::Airy { .. } => "dude4 airy",
    };
    let mut st = ConvergenceStudy { case: name.into(), rows: vec![], finest: None };
    for &n in resolutions {
        if n < 3 {
            return Err(PdeError::Config("resolutions must be at least 3".into()));
        }
        let (err, h, rep) = match *case {
            Dude4Case::Affine { p, q, g, y_range } => {
                let h = 1.0 / n as f64;
                let (y0, y1) = y_range;
                let sp = [h, h];
                let u0 = GridField::periodic_from_fn(&[n, n], &sp, y0, |_| p + q * y0)?;
                let u1 = GridField::periodic_from_fn(&[n, n], &sp, y0, |_| q)?;
                let gg = GridField::periodic_from_fn(&[n, n], &sp, y0, |_| g)?;
                let rep = evolve_dude4(&u0, &u1, &gg, &Dude4Config { y_range, steps })?;
                let want = p + q * y1;
                let err = rep.final_field.values.iter().map(|v| (v - want).abs()).fold(0.0, f64::max);
                (err, h, rep)
            }
            Dude4Case::Airy { y_range } => {
                let h = 2.0 * PI / n as f64;
                let (y0, y1) = y_range;
                let ai = |y: f64| airy_ai(y).map_err(|e| PdeError::Config(e.to_string()));
                let (a0, a1) = (ai(y0)?, ai(y1)?[0]);
                let shape = [n, 1];
                let sp = [h, 1.0];
                let u0 = GridField::periodic_from_fn(&shape, &sp, y0, |x| 1.0 + a0[0] * x[0].sin())?;
                let u1 = GridField::periodic_from_fn(&shape, &sp, y0, |x| a0[1] * x[0].sin())?;
                let g = GridField::periodic_from_fn(&shape, &sp, y0, |_| 1.0)?;
                let rep = evolve_dude4(&u0, &u1, &g, &Dude4Config { y_range, steps })?;
                let err = (0..rep.final_field.len())
                    .map(|k| (rep.final_field.values[k] - 1.0 - a1 * rep.final_field.coords(k)[0].sin()).abs())
                    .fold(0.0, f64::max);
                (err, h, rep)
            }
        };
        st.push(n, h, steps, err);
        st.finest = Some(rep);
    }
    Ok(st)
}
