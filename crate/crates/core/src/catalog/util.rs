use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CatalogError, ExpectedRank, Kind, Structure, StructureBundle};
use crate::exterior::{DifferentialForm, MetricField};
use crate::fields::{Chart, ScalarField};
use crate::structures::{model_spin7_form, Spin7Structure};

/// Shorthand constructors on one chart.
pub(crate) struct On(pub Arc<Chart>);

impl On {
    pub fn x(&self, i: usize) -> ScalarField {
        ScalarField::coord(&self.0, i)
    }
    pub fn c(&self, v: f64) -> ScalarField {
        ScalarField::constant(&self.0, v)
    }
    pub fn dx(&self, i: usize) -> DifferentialForm {
        DifferentialForm::dx(&self.0, i)
    }
    pub fn dxx(&self, i: usize, j: usize) -> DifferentialForm {
        self.dx(i).wedge(&self.dx(j))
    }
    /// Σ f_k dx_{i_k}
    pub fn one(&self, terms: &[(usize, ScalarField)]) -> DifferentialForm {
        DifferentialForm::one_form(&self.0, terms)
    }
}

/// Chart with the given coordinate names, positive coordinates listed in `positive`.
pub(crate) fn chart(name: &str, coords: &[&str], positive: &[usize]) -> Arc<Chart> {
    let mut c = Chart::new(name, coords);
    for &i in positive {
        c = c.with_domain(i, 0.0, f64::INFINITY);
    }
    c.shared()
}

pub(crate) fn bundle(name: &str, kind: Kind, structure: Structure, provenance: &str, rank: ExpectedRank, domain: Vec<(f64, f64)>) -> StructureBundle {
    StructureBundle {
        name: name.into(),
        kind,
        chart: structure.chart().clone(),
        structure,
        params: BTreeMap::new(),
        connection_potentials: BTreeMap::new(),
        provenance: provenance.into(),
        expected_holonomy_rank: rank,
        domain,
        reduction: None,
        printed_metric: None,
        identification: None,
        corollary: None,
        second: None,
        foliation_coordinate: None,
    }
}

/// Constant model form on ℝ⁸ with the Euclidean metric.
pub(crate) fn flat_spin7() -> Result<StructureBundle, CatalogError> {
    let c = chart("r8", &["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"], &[]);
    let s = Spin7Structure::new(model_spin7_form(&c)?, MetricField::identity(&c))?;
    let mut b = bundle("flat_spin7", Kind::Spin7, Structure::Spin7(s), "fixture", ExpectedRank::Exact(0), vec![(-1.0, 1.0); 8]);
    b.foliation_coordinate = Some(0);
    Ok(b)
}
