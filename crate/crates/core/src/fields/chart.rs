use std::f64::consts::TAU;
use std::sync::Arc;

use super::FieldError;

/// A single coordinate chart. Every example in scope lives on one chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub name: String,
    pub coord_names: Vec<String>,
    pub periodic_mask: Vec<bool>,
    pub periods: Vec<f64>,
    /// Validity region, one open interval per coordinate.
    pub domain_box: Vec<(f64, f64)>,
}

impl Chart {
    /// Chart with unbounded, non-periodic coordinates.
    pub fn new(name: &str, coords: &[&str]) -> Self {
        let n = coords.len();
        Chart {
            name: name.to_string(),
            coord_names: coords.iter().map(|c| c.to_string()).collect(),
            periodic_mask: vec![false; n],
            periods: vec![TAU; n],
            domain_box: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        }
    }

    pub fn with_domain(mut self, i: usize, lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "empty domain interval for {}", self.coord_names[i]);
        self.domain_box[i] = (lo, hi);
        self
    }

    pub fn with_period(mut self, i: usize, period: f64) -> Self {
        self.periodic_mask[i] = true;
        self.periods[i] = period;
        self
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coord_names.iter().position(|c| c == name)
    }

    pub fn shared(self) -> Arc<Chart> {
        Arc::new(self)
    }

    /// Domain check, reducing periodic coordinates first.
    pub fn check(&self, coords: &[f64]) -> Result<Vec<f64>, FieldError> {
        if coords.len() != self.dim() {
            return Err(FieldError::DimensionMismatch { expected: self.dim(), got: coords.len() });
        }
        let mut out = coords.to_vec();
        for i in 0..self.dim() {
            let (lo, hi) = self.domain_box[i];
            let mut x = out[i];
            if self.periodic_mask[i] && lo.is_finite() {
                let p = self.periods[i];
                x = lo + (x - lo).rem_euclid(p);
                out[i] = x;
                if x < lo || x > hi {
                    return Err(self.domain_err(i, x));
                }
            } else if !(x > lo && x < hi) || !x.is_finite() {
                return Err(self.domain_err(i, x));
            }
        }
        Ok(out)
    }

    fn domain_err(&self, i: usize, x: f64) -> FieldError {
        let (lo, hi) = self.domain_box[i];
        FieldError::Domain { coord: self.coord_names[i].clone(), value: x, lo, hi }
    }
}

pub fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A point of a chart, validated against its domain box.
#[derive(Clone, Debug)]
pub struct Point {
    pub chart: Arc<Chart>,
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(chart: &Arc<Chart>, coords: &[f64]) -> Result<Self, FieldError> {
        let coords = chart.check(coords)?;
        Ok(Point { chart: chart.clone(), coords })
    }
}

/// Coordinate projection between charts: source coordinate i is target coordinate `map[i]`.
///
/// All quotient maps in scope (fiber bundles over a base) are of this form.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub source: Arc<Chart>,
    pub target: Arc<Chart>,
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn new(source: &Arc<Chart>, target: &Arc<Chart>, map: Vec<usize>) -> Result<Arc<Self>, FieldError> {
        if map.len() != source.dim() || map.iter().any(|&m| m >= target.dim()) {
            return Err(FieldError::DimensionMismatch { expected: source.dim(), got: map.len() });
        }
        let mut seen = map.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != map.len() {
            return Err(FieldError::DimensionMismatch { expected: source.dim(), got: seen.len() });
        }
        Ok(Arc::new(Embedding { source: source.clone(), target: target.clone(), map }))
    }

    /// Leading-coordinate inclusion: source coordinates are the first ones of target.
    pub fn prefix(source: &Arc<Chart>, target: &Arc<Chart>) -> Arc<Self> {
        Self::new(source, target, (0..source.dim()).collect()).expect("prefix embedding")
    }

    /// Point of the target with source coordinates `small` and the remaining
    /// coordinates filled from `fiber` in increasing index order.
    pub fn lift_point(&self, small: &[f64], fiber: &[f64]) -> Vec<f64> {
        let nb = self.target.dim();
        let mut rest = fiber.iter();
        (0..nb)
            .map(|i| match self.map.iter().position(|&m| m == i) {
                Some(k) => small[k],
                None => *rest.next().expect("fiber coordinates"),
            })
            .collect()
    }

    /// Target coordinates not hit by the map.
    pub fn fiber_indices(&self) -> Vec<usize> {
        (0..self.target.dim()).filter(|i| !self.map.contains(i)).collect()
    }

    /// self followed by `outer`.
    pub fn then(&self, outer: &Embedding) -> Result<Arc<Embedding>, FieldError> {
        if !same_chart(&self.target, &outer.source) {
            return Err(FieldError::ChartMismatch(self.target.name.clone(), outer.source.name.clone()));
        }
        Embedding::new(&self.source, &outer.target, self.map.iter().map(|&i| outer.map[i]).collect())
    }

    pub fn restrict(&self, big: &[f64]) -> Vec<f64> {
        self.map.iter().map(|&i| big[i]).collect()
    }

    pub fn restrict_mask(&self, mask: u32) -> Option<u32> {
        // Inverse image of a multi-index; None if it uses a target-only direction.
        let mut out = 0u32;
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            let i = self.map.iter().position(|&t| t == b)?;
            out |= 1 << i;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_reduction_and_domain() {
        let c = Chart::new("c", &["x", "t"]).with_domain(0, 0.0, TAU).with_period(0, TAU).with_domain(1, 0.0, f64::INFINITY).shared();
        let p = Point::new(&c, &[TAU + 1.0, 2.0]).unwrap();
        assert!((p.coords[0] - 1.0).abs() < 1e-15);
        match Point::new(&c, &[0.0, -1.0]) {
            Err(FieldError::Domain { coord, .. }) => assert_eq!(coord, "t"),
            other => panic!("{other:?}"),
        }
    }
}
