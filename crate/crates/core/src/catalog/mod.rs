//! Explicit examples, each assembled into a verified structure bundle.

mod corollary;
mod glps;
mod hyperkahler;
mod second;
pub(crate) mod util;

pub use corollary::{CorollaryIData, S as COROLLARY_S};
pub use hyperkahler::{
    flat_hyperkahler, gh_monopole, gibbons_hawking_monopole, gibbons_hawking_preconditions, gibbons_hawking_triple, tod_potential, tod_triple,
    HyperkahlerData,
};
pub use second::{SecondReductionData, S as SECOND_S, Y as SECOND_Y};

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_pcg::Pcg64;
use serde::Serialize;

use crate::exterior::multi::full;
use crate::exterior::{DifferentialForm, ExteriorError, MetricField};
use crate::fields::{Chart, FieldError, ScalarField};
use crate::structures::{
    G2Structure, ReductionData, ResidualReport, SU3Structure, SU4Structure, Spin7Structure, StructureError,
};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("{entry}: unknown parameter `{name}`")]
    UnknownParam { entry: String, name: String },
    #[error("{entry}: parameters violate `{violated}`")]
    Params { entry: String, violated: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

impl From<ExteriorError> for CatalogError {
    fn from(e: ExteriorError) -> Self {
        CatalogError::Structure(e.into())
    }
}

impl From<FieldError> for CatalogError {
    fn from(e: FieldError) -> Self {
        CatalogError::Structure(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Spin7,
    G2,
    Su3,
    Su4,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Spin7 => "spin7",
            Kind::G2 => "g2",
            Kind::Su3 => "su3",
            Kind::Su4 => "su4",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "rank", rename_all = "snake_case")]
pub enum ExpectedRank {
    Exact(usize),
    AtMost(usize),
    Unknown,
}

impl ExpectedRank {
    pub fn admits(&self, rank: usize) -> bool {
        match *self {
            ExpectedRank::Exact(r) => rank == r,
            ExpectedRank::AtMost(r) => rank <= r,
            ExpectedRank::Unknown => true,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Structure {
    Spin7(Spin7Structure),
    G2(G2Structure),
    Su3(SU3Structure),
    Su4(SU4Structure),
}

impl Structure {
    pub fn metric(&self) -> &MetricField {
        match self {
            Structure::Spin7(s) => &s.metric,
            Structure::G2(s) => &s.metric,
            Structure::Su3(s) => &s.metric,
            Structure::Su4(s) => &s.metric,
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.metric().chart()
    }

    pub fn as_spin7(&self) -> Option<&Spin7Structure> {
        match self {
            Structure::Spin7(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_g2(&self) -> Option<&G2Structure> {
        match self {
            Structure::G2(s) => Some(s),
            _ => None,
        }
    }
}

/// Coordinates of another entry's chart as functions on this entry's chart,
/// under which the two metrics agree.
#[derive(Clone, Debug)]
pub struct Identification {
    pub target: String,
    pub target_params: BTreeMap<String, f64>,
    pub map: Vec<ScalarField>,
}

/// Data of one catalog entry.
#[derive(Clone, Debug)]
pub struct StructureBundle {
    pub name: String,
    pub kind: Kind,
    pub chart: Arc<Chart>,
    pub structure: Structure,
    pub params: BTreeMap<String, f64>,
    pub connection_potentials: BTreeMap<String, DifferentialForm>,
    pub provenance: String,
    pub expected_holonomy_rank: ExpectedRank,
    /// Sampling box, one interval per chart coordinate.
    pub domain: Vec<(f64, f64)>,
    pub reduction: Option<ReductionData>,
    pub printed_metric: Option<MetricField>,
    pub identification: Option<Identification>,
    pub corollary: Option<CorollaryIData>,
    pub second: Option<SecondReductionData>,
    /// Index of the coordinate that parametrizes the hypersurface foliation.
    pub foliation_coordinate: Option<usize>,
}

#[derive(Serialize)]
pub struct Descriptor<'a> {
    pub name: &'a str,
    pub kind: Kind,
    pub provenance: &'a str,
    pub params: &'a BTreeMap<String, f64>,
    pub coordinates: &'a [String],
    pub domain: &'a [(f64, f64)],
    pub expected_holonomy_rank: ExpectedRank,
}

pub struct RegistryEntry {
    pub name: &'static str,
    pub kind: Kind,
    pub provenance: &'static str,
    pub defaults: &'static [(&'static str, f64)],
}

/// Every constructible entry with its section tag and default parameters.
pub const REGISTRY: &[RegistryEntry] = &[
    RegistryEntry { name: "glps_spin7", kind: Kind::Spin7, provenance: "§6", defaults: &[] },
    RegistryEntry { name: "glps_g2", kind: Kind::G2, provenance: "§6", defaults: &[] },
    RegistryEntry { name: "glps_cy", kind: Kind::Su3, provenance: "§6", defaults: &[] },
    RegistryEntry { name: "glps_su4", kind: Kind::Su4, provenance: "§6", defaults: &[] },
    RegistryEntry { name: "nil24_spin7", kind: Kind::Spin7, provenance: "§7", defaults: &[] },
    RegistryEntry { name: "nil24_g2", kind: Kind::G2, provenance: "§7", defaults: &[] },
    RegistryEntry {
        name: "constant_I",
        kind: Kind::Spin7,
        provenance: "§5",
        defaults: &[("A", 1.0), ("c", 0.0), ("a", 0.0), ("b", 0.0), ("p", 0.0), ("q", 1.0), ("s_lo", 0.5), ("s_hi", 2.0)],
    },
    RegistryEntry { name: "gh_spin7", kind: Kind::Spin7, provenance: "§6", defaults: &[("c", 1.0), ("p", 1.0), ("v0", 1.0), ("m", 1.0)] },
    RegistryEntry { name: "tod_spin7", kind: Kind::Spin7, provenance: "§7", defaults: &[("c", 1.0), ("p", 1.0), ("v0", 2.0), ("eps", 1.0)] },
    RegistryEntry { name: "perturbed_glps", kind: Kind::Spin7, provenance: "§9", defaults: &[("s_lo", 0.5), ("s_hi", 2.0)] },
    RegistryEntry { name: "constant_II", kind: Kind::Spin7, provenance: "§11", defaults: &[("c", 1.0), ("p", 1.0), ("q", 1.0)] },
    RegistryEntry { name: "log_example", kind: Kind::Spin7, provenance: "§12", defaults: &[] },
    RegistryEntry { name: "airy_example", kind: Kind::Spin7, provenance: "§12", defaults: &[] },
    RegistryEntry { name: "flat_spin7", kind: Kind::Spin7, provenance: "fixture", defaults: &[] },
];

pub fn registry_entry(name: &str) -> Result<&'static RegistryEntry, CatalogError> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| CatalogError::UnknownEntry(name.into()))
}

/// Defaults overridden by `overrides`; unknown keys are rejected.
pub fn resolve_params(name: &str, overrides: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>, CatalogError> {
    let entry = registry_entry(name)?;
    let mut p: BTreeMap<String, f64> = entry.defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in overrides {
        if !p.contains_key(k) {
            return Err(CatalogError::UnknownParam { entry: name.into(), name: k.clone() });
        }
        p.insert(k.clone(), *v);
    }
    Ok(p)
}

/// Assemble a registry entry; the structure invariants are checked on a small
/// deterministic sample during assembly.
pub fn build(name: &str, overrides: &BTreeMap<String, f64>) -> Result<StructureBundle, CatalogError> {
    let params = resolve_params(name, overrides)?;
    let bundle = match name {
        "glps_spin7" => glps::glps_spin7()?,
        "glps_g2" => glps::glps_g2()?,
        "glps_cy" => glps::glps_cy()?,
        "glps_su4" => glps::glps_su4()?,
        "nil24_spin7" => glps::nil24_spin7()?,
        "nil24_g2" => glps::nil24_g2()?,
        "constant_I" => corollary::constant_i(&params)?,
        "gh_spin7" => corollary::gh_spin7(&params)?,
        "tod_spin7" => corollary::tod_spin7(&params)?,
        "perturbed_glps" => corollary::perturbed_glps(&params)?,
        "constant_II" => second::constant_ii(&params)?,
        "log_example" => second::log_example()?,
        "airy_example" => second::airy_example()?,
        "flat_spin7" => util::flat_spin7()?,
        _ => return Err(CatalogError::UnknownEntry(name.into())),
    };
    let mut bundle = bundle;
    bundle.params = params;
    let pts = bundle.sample(8, 0x5eed);
    bundle.verify(&pts, 1e-8)?;
    Ok(bundle)
}

pub fn build_default(name: &str) -> Result<StructureBundle, CatalogError> {
    build(name, &BTreeMap::new())
}

fn top(p: &crate::exterior::PForm) -> f64 {
    p.get(full(p.dim))
}

impl StructureBundle {
    pub fn descriptor(&self) -> Descriptor<'_> {
        Descriptor {
            name: &self.name,
            kind: self.kind,
            provenance: &self.provenance,
            params: &self.params,
            coordinates: &self.chart.coord_names,
            domain: &self.domain,
            expected_holonomy_rank: self.expected_holonomy_rank,
        }
    }

    pub fn metric(&self) -> &MetricField {
        self.structure.metric()
    }

    /// Uniform points in the sampling box from a seeded PCG stream.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        sample_box(&self.domain, n, seed)
    }

    /// Closure residuals: dΦ for Spin(7); dφ and d*φ for G2; dω and dΩ for SU(n).
    pub fn closure_at(&self, x: &[f64]) -> Result<ResidualReport, StructureError> {
        let mut r = ResidualReport::new();
        let d = |f: &DifferentialForm| -> Result<f64, StructureError> { Ok(f.eval_at(x, 1)?.d().max_abs()) };
        match &self.structure {
            Structure::Spin7(s) => r.record("d_phi", d(&s.phi)?, x),
            Structure::G2(s) => {
                r.record("d_phi", d(&s.phi)?, x);
                r.record("d_star_phi", d(&s.star_phi)?, x);
            }
            Structure::Su3(s) => {
                r.record("d_omega", d(&s.omega)?, x);
                r.record("d_omega_plus", d(&s.omega_plus)?, x);
                r.record("d_omega_minus", d(&s.omega_minus)?, x);
            }
            Structure::Su4(s) => {
                r.record("d_omega", d(&s.omega)?, x);
                r.record("d_omega_re", d(&s.omega_re)?, x);
                r.record("d_omega_im", d(&s.omega_im)?, x);
            }
        }
        Ok(r)
    }

    /// Kind invariants and closure at one point.
    pub fn check_at(&self, x: &[f64]) -> Result<ResidualReport, StructureError> {
        let mut r = match &self.structure {
            Structure::Spin7(s) => s.check_at(x)?,
            Structure::G2(s) => s.check_at(x)?,
            Structure::Su3(s) => s.check_at(x)?,
            Structure::Su4(s) => s.check_at(x)?,
        };
        r.merge(&self.closure_at(x)?);
        Ok(r)
    }

    /// Merged residuals over `points`, failing on the first entry above `tol`.
    pub fn verify(&self, points: &[Vec<f64>], tol: f64) -> Result<ResidualReport, StructureError> {
        let mut total = ResidualReport::new();
        for x in points {
            let r = self.check_at(x)?;
            if let Some((name, v)) = r.first_failure(tol) {
                return Err(StructureError::Invariant { identity: format!("{}: {name}", self.name), point: x.clone(), residual: v });
            }
            total.merge(&r);
        }
        Ok(total)
    }

    /// max over components of |g − g_printed| relative to max |g|.
    pub fn printed_metric_residual(&self, x: &[f64]) -> Result<Option<f64>, StructureError> {
        let Some(p) = &self.printed_metric else { return Ok(None) };
        let a = self.metric().values_at(x)?;
        let b = p.values_at(x)?;
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Some(a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max) / scale))
    }

    /// Relative mismatch between this metric and the pullback of `other`'s metric
    /// along the recorded identification.
    pub fn identification_residual(&self, other: &StructureBundle, x: &[f64]) -> Result<f64, StructureError> {
        let id = self.identification.as_ref().ok_or_else(|| StructureError::Precondition { name: "identification".into(), residual: f64::INFINITY })?;
        let n = self.chart.dim();
        let m = other.chart.dim();
        let jets: Vec<_> = id.map.iter().map(|f| f.eval_at(x, 1)).collect::<Result<_, _>>()?;
        let y: Vec<f64> = jets.iter().map(|j| j.value).collect();
        let gy = other.metric().values_at(&y)?;
        let gx = self.metric().values_at(x)?;
        let mut worst: f64 = 0.0;
        let scale = gx.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        v += jets[a].d(i) * gy[a * m + b] * jets[b].d(j);
                    }
                }
                worst = worst.max((v - gx[i * n + j]).abs());
            }
        }
        Ok(worst / scale)
    }

    /// Φ∧Φ / vol for Spin(7) entries (14 for a normalized form).
    pub fn phi_squared_ratio(&self, x: &[f64]) -> Result<Option<f64>, StructureError> {
        let Structure::Spin7(s) = &self.structure else { return Ok(None) };
        let p = s.phi.eval_at(x, 0)?;
        let g = s.metric.eval_full(x, 0)?;
        Ok(Some(top(&p.wedge(&p)) * s.metric.orientation_at(x)? / g.sqrt_det.value))
    }
}

pub fn sample_box(domain: &[(f64, f64)], n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = Pcg64::new(seed as u128, 0xa02b_dbf7_bb3c_0a7a_c28f_a16a_64ab_f96d);
    (0..n).map(|_| domain.iter().map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..hi) } else { lo }).collect()).collect()
}

#[cfg(test)]
mod tests;
