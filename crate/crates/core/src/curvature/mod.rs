//! Levi-Civita curvature from metric jets, Ricci forms, and curvature-operator
//! rank certificates.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exterior::{dc, AlmostComplex, DifferentialForm, ExteriorError, MetricField};
use crate::fields::ScalarField;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CurvatureError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("metric degenerate at {point:?}")]
    Degenerate { point: Vec<f64> },
    #[error("no sample points")]
    NoPoints,
}

/// Curvature data at one point. Arrays are dense row-major:
/// `christoffel[k][i][j]` = Γ^k_ij, `riemann[i][j][k][l]` = R_ijkl (lowered).
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    pub dim: usize,
    pub metric: Vec<f64>,
    pub christoffel: Vec<f64>,
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
    /// max |R_ijkl + R_jkil + R_kijl| / max |R|.
    pub bianchi_residual: f64,
}

impl CurvatureSample {
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    pub fn ric(&self, i: usize, j: usize) -> f64 {
        self.ricci[i * self.dim + j]
    }

    pub fn max_abs_riemann(&self) -> f64 {
        self.riemann.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    /// max |Ric_ij| / max |g_ij|.
    pub fn ricci_ratio(&self) -> f64 {
        let r = self.ricci.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let g = self.metric.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        r / g
    }

    /// Orthonormal frame from the Cholesky factor: columns e_a with g(e_a, e_b) = δ_ab.
    pub fn orthonormal_frame(&self) -> Result<DMatrix<f64>, CurvatureError> {
        let n = self.dim;
        let g = DMatrix::from_row_slice(n, n, &self.metric);
        let l = g.cholesky().ok_or_else(|| CurvatureError::Degenerate { point: self.point.clone() })?;
        let linv = l.l().try_inverse().ok_or_else(|| CurvatureError::Degenerate { point: self.point.clone() })?;
        Ok(linv.transpose())
    }

    /// Curvature operator on Λ² (pairs a<b) in the given orthonormal frame.
    pub fn curvature_operator(&self, frame: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim;
        // Transform one index at a time: n⁵ work instead of n⁸.
        let mut t = self.riemann.clone();
        for slot in 0..4 {
            let mut out = vec![0.0; t.len()];
            let stride = n.pow(3 - slot as u32);
            for idx in 0..t.len() {
                let a = (idx / stride) % n;
                let base = idx - a * stride;
                let mut s = 0.0;
                for i in 0..n {
                    let f = frame[(i, a)];
                    if f != 0.0 {
                        s += f * t[base + i * stride];
                    }
                }
                out[idx] = s;
            }
            t = out;
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        DMatrix::from_fn(m, m, |p, q| {
            let (a, b) = pairs[p];
            let (c, d) = pairs[q];
            t[((a * n + b) * n + c) * n + d]
        })
    }
}

/// Riemann, Ricci and scalar curvature at `x` from second-order metric jets.
pub fn curvature_at(g: &MetricField, x: &[f64]) -> Result<CurvatureSample, CurvatureError> {
    let n = g.chart().dim();
    let mj = g.eval_full(x, 2).map_err(|e| match e {
        ExteriorError::NotPositiveDefinite { point } => CurvatureError::Degenerate { point },
        other => other.into(),
    })?;
    let gv = |i: usize, j: usize| mj.g.get(i, j).value;
    let gi = |i: usize, j: usize| mj.inverse.get(i, j).value;
    let dg = |i: usize, j: usize, k: usize| mj.g.get(i, j).d(k);
    let ddg = |i: usize, j: usize, k: usize, l: usize| mj.g.get(i, j).dd(k, l);

    // Γ_{l,ij} lowered, then raised.
    let mut low = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                low[(l * n + i) * n + j] = 0.5 * (dg(j, l, i) + dg(i, l, j) - dg(i, j, l));
            }
        }
    }
    let mut chr = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                chr[(k * n + i) * n + j] = (0..n).map(|l| gi(k, l) * low[(l * n + i) * n + j]).sum();
            }
        }
    }
    let gam = |k: usize, i: usize, j: usize| chr[(k * n + i) * n + j];
    let lowg = |l: usize, i: usize, j: usize| low[(l * n + i) * n + j];

    let mut r = vec![0.0; n.pow(4)];
    for i in 0..n {
        for k in 0..n {
            for l in 0..n {
                for m in 0..n {
                    let mut v = 0.5 * (ddg(i, m, k, l) + ddg(k, l, i, m) - ddg(i, l, k, m) - ddg(k, m, i, l));
                    for p in 0..n {
                        v += lowg(p, i, m) * gam(p, k, l) - lowg(p, i, l) * gam(p, k, m);
                    }
                    r[((i * n + k) * n + l) * n + m] = v;
                }
            }
        }
    }
    let ri = |i: usize, j: usize, k: usize, l: usize| r[((i * n + j) * n + k) * n + l];
    let mut ric = vec![0.0; n * n];
    for k in 0..n {
        for m in 0..n {
            let mut v = 0.0;
            for i in 0..n {
                for l in 0..n {
                    v += gi(i, l) * ri(i, k, l, m);
                }
            }
            ric[k * n + m] = v;
        }
    }
    let scalar = (0..n).flat_map(|k| (0..n).map(move |m| (k, m))).map(|(k, m)| gi(k, m) * ric[k * n + m]).sum();
    let rmax = r.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut bianchi: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    bianchi = bianchi.max((ri(i, j, k, l) + ri(j, k, i, l) + ri(k, i, j, l)).abs());
                }
            }
        }
    }
    let metric = (0..n * n).map(|k| gv(k / n, k % n)).collect();
    Ok(CurvatureSample {
        point: x.to_vec(),
        dim: n,
        metric,
        christoffel: chr,
        riemann: r,
        ricci: ric,
        scalar,
        bianchi_residual: if rmax > 0.0 { bianchi / rmax } else { 0.0 },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Certified,
    Inconclusive,
}

/// Curvature-operator rank over a sample: the rank is the largest pointwise rank
/// and the gap ratio the smallest pointwise ratio (smallest kept / largest dropped
/// singular value).
#[derive(Clone, Debug, Serialize)]
pub struct HolonomyCertificate {
    pub points: Vec<Vec<f64>>,
    pub operator_rank: usize,
    pub pointwise_ranks: Vec<usize>,
    /// Singular values at the point of largest rank, descending.
    pub singular_values: Vec<f64>,
    pub gap_ratio: f64,
    pub status: CertificateStatus,
}

/// Relative threshold under which singular values count as zero.
pub const RANK_RELATIVE_THRESHOLD: f64 = 1e-8;
/// Absolute floor (frame units) so that round-off on flat metrics is not counted.
pub const RANK_ABSOLUTE_FLOOR: f64 = 1e-9;
pub const GAP_REQUIRED: f64 = 1e6;

fn rank_and_gap(sv: &[f64]) -> (usize, f64) {
    let smax = sv.first().copied().unwrap_or(0.0);
    let cut = (RANK_RELATIVE_THRESHOLD * smax).max(RANK_ABSOLUTE_FLOOR);
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let gap = match (rank, sv.get(rank)) {
        (0, _) | (_, None) => f64::INFINITY,
        (r, Some(&d)) => {
            if d == 0.0 {
                f64::INFINITY
            } else {
                sv[r - 1] / d
            }
        }
    };
    (rank, gap)
}

/// Singular values of the curvature operator at one point, descending, in the
/// frame `rotation · (Cholesky frame)` (identity rotation if `None`).
pub fn operator_singular_values(g: &MetricField, x: &[f64], rotation: Option<&DMatrix<f64>>) -> Result<Vec<f64>, CurvatureError> {
    let c = curvature_at(g, x)?;
    let mut frame = c.orthonormal_frame()?;
    if let Some(q) = rotation {
        frame = &frame * q;
    }
    let op = c.curvature_operator(&frame);
    let sym = (&op + op.transpose()) * 0.5;
    let mut sv: Vec<f64> = sym.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}

pub fn curvature_operator_rank(g: &MetricField, points: &[Vec<f64>]) -> Result<HolonomyCertificate, CurvatureError> {
    if points.is_empty() {
        return Err(CurvatureError::NoPoints);
    }
    let svs: Vec<Vec<f64>> = points.par_iter().map(|x| operator_singular_values(g, x, None)).collect::<Result<_, _>>()?;
    let per: Vec<(usize, f64)> = svs.iter().map(|s| rank_and_gap(s)).collect();
    let (best, _) = per.iter().enumerate().max_by_key(|(_, (r, _))| *r).unwrap();
    let gap_ratio = per.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(HolonomyCertificate {
        points: points.to_vec(),
        operator_rank: per[best].0,
        pointwise_ranks: per.iter().map(|p| p.0).collect(),
        singular_values: svs[best].clone(),
        gap_ratio,
        status: if gap_ratio > GAP_REQUIRED { CertificateStatus::Certified } else { CertificateStatus::Inconclusive },
    })
}

/// Max over points of |ρ − expected| where ρ(X, Y) = Ric(JX, Y) is computed from
/// the curvature of `g` and `expected` is a 2-form, relative to max |Ric|
/// (absolute when Ric vanishes).
pub fn ricci_form_residual(g: &MetricField, j: &AlmostComplex, expected: &DifferentialForm, points: &[Vec<f64>]) -> Result<f64, CurvatureError> {
    let res: Vec<f64> = points
        .par_iter()
        .map(|x| -> Result<f64, CurvatureError> {
            let c = curvature_at(g, x)?;
            let n = c.dim;
            let m = j.eval_at(x, 0)?;
            let e = expected.eval_at(x, 0)?;
            let scale = c.ricci.iter().fold(1.0f64, |a, b| a.max(b.abs()));
            let mut worst: f64 = 0.0;
            for a in 0..n {
                for b in (a + 1)..n {
                    let rho: f64 = (0..n).map(|k| m.get(k, a).value * c.ric(k, b)).sum();
                    let want = e.get((1 << a) | (1 << b));
                    worst = worst.max((rho - want).abs() / scale);
                }
            }
            Ok(worst)
        })
        .collect::<Result<_, _>>()?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

/// Kähler quotient check: Ricci form of g_ω against −½ dd^c ln(H s^{2/3}).
pub fn kahler_ricci_form_check(
    su3: &crate::structures::SU3Structure,
    h: &ScalarField,
    s: &ScalarField,
    points: &[Vec<f64>],
) -> Result<f64, CurvatureError> {
    let f = (h * &s.powf(2.0 / 3.0)).ln();
    let expected = dc(&DifferentialForm::function(&f), &su3.j)?.d().scale_c(-0.5);
    ricci_form_residual(&su3.metric, &su3.j, &expected, points)
}

#[cfg(test)]
mod tests;
