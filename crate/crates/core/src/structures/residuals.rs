use std::collections::BTreeMap;

use serde::Serialize;

/// Per-identity maximum residual over a sample, with the worst point.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ResidualReport {
    pub entries: BTreeMap<String, (f64, Vec<f64>)>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, name: &str, value: f64, point: &[f64]) {
        let v = if value.is_nan() { f64::INFINITY } else { value };
        let e = self.entries.entry(name.to_string()).or_insert((0.0, point.to_vec()));
        if v > e.0 || (e.0 == 0.0 && v == 0.0 && e.1.is_empty()) {
            *e = (v, point.to_vec());
        }
    }

    pub fn merge(&mut self, o: &ResidualReport) {
        for (k, (v, p)) in &o.entries {
            self.record(k, *v, p);
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        self.entries.get(name).map_or(f64::NAN, |e| e.0)
    }

    pub fn max(&self) -> f64 {
        self.entries.values().map(|e| e.0).fold(0.0, f64::max)
    }

    /// First entry above its tolerance, if any.
    pub fn first_failure(&self, tol: f64) -> Option<(&str, f64)> {
        self.entries.iter().find(|(_, e)| !(e.0 <= tol)).map(|(k, e)| (k.as_str(), e.0))
    }
}
