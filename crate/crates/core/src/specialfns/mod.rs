//! Airy and parabolic-cylinder functions from their defining ODEs.

mod ode;

pub use ode::{Coefficient, ODESolution1D};

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::fields::{FieldError, Univariate};

const FIXTURE: &str = include_str!("../../data/special_constants.txt");
pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum SpecialError {
    #[error("{name}: argument {x} outside [{lo}, {hi}]")]
    Domain { name: String, x: f64, lo: f64, hi: f64 },
    #[error("oracle fixture: {0}")]
    Fixture(String),
    #[error("invalid domain [{0}, {1}]: must contain 0")]
    BadDomain(f64, f64),
}

impl From<SpecialError> for FieldError {
    fn from(e: SpecialError) -> Self {
        match e {
            SpecialError::Domain { name, x, lo, hi } => FieldError::SpecialDomain { name, x, lo, hi },
            other => FieldError::Other(other.to_string()),
        }
    }
}

/// Values from the committed oracle fixture, keyed by name (e.g. `ai(0)`).
pub fn oracle_constants() -> &'static BTreeMap<String, f64> {
    static C: OnceLock<BTreeMap<String, f64>> = OnceLock::new();
    C.get_or_init(|| {
        FIXTURE
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let (k, v) = l.split_once(' ').expect("fixture line is `name value`");
                (k.to_string(), v.trim().parse::<f64>().expect("fixture value parses"))
            })
            .collect()
    })
}

pub fn oracle(name: &str) -> Result<f64, SpecialError> {
    oracle_constants().get(name).copied().ok_or_else(|| SpecialError::Fixture(format!("missing `{name}`")))
}

/// The decaying solution of y'' = q·y on a bounded interval containing 0,
/// scaled so that y(0) matches the fixture.
#[derive(Clone, Debug)]
pub struct DecayingSolution {
    name: String,
    pub solution: ODESolution1D,
}

impl DecayingSolution {
    fn build(name: &str, coef: Coefficient, lo: f64, hi: f64, y0_key: &str) -> Result<Self, SpecialError> {
        if !(lo <= 0.0 && hi >= 0.0 && lo < hi) {
            return Err(SpecialError::BadDomain(lo, hi));
        }
        // Start far enough out that the growing mode is suppressed by ≈ e^-30 at hi.
        let (far, ratio) = match coef {
            Coefficient::Linear => {
                let far = (hi.max(0.0).powf(1.5) + 22.5).powf(2.0 / 3.0);
                (far, -far.sqrt() - 0.25 / far)
            }
            Coefficient::Quadratic => {
                let far = (hi * hi + 30.0).sqrt();
                (far, -far - 0.5 / far)
            }
        };
        let raw = ODESolution1D::integrate(coef, far, 1.0, ratio, lo, TOLERANCE);
        let at0 = raw.eval(0.0).expect("0 is inside the integration range")[0];
        let solution = raw.scaled(oracle(y0_key)? / at0).restricted(lo, hi);
        Ok(DecayingSolution { name: name.to_string(), solution })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.solution.domain
    }

    pub fn eval(&self, x: f64) -> Result<[f64; 3], SpecialError> {
        self.solution.eval(x).ok_or_else(|| {
            let (lo, hi) = self.solution.domain;
            SpecialError::Domain { name: self.name.clone(), x, lo, hi }
        })
    }
}

impl Univariate for DecayingSolution {
    fn name(&self) -> &str {
        &self.name
    }
    fn eval3(&self, x: f64) -> Result<[f64; 3], FieldError> {
        Ok(self.eval(x)?)
    }
}

/// y′ of a decaying solution as its own registered function, with (y′, y″, y‴)
/// all taken from the ODE so that jets of y′ stay exact to second order.
pub struct FirstDerivative {
    name: String,
    base: Arc<DecayingSolution>,
}

impl FirstDerivative {
    pub fn new(base: Arc<DecayingSolution>) -> Self {
        FirstDerivative { name: format!("{}'", base.name), base }
    }
}

impl Univariate for FirstDerivative {
    fn name(&self) -> &str {
        &self.name
    }
    fn eval3(&self, x: f64) -> Result<[f64; 3], FieldError> {
        let [y, dy, ddy] = self.base.eval(x)?;
        let c = self.base.solution.coefficient;
        let dq = match c {
            Coefficient::Linear => 1.0,
            Coefficient::Quadratic => 2.0 * x,
        };
        Ok([dy, ddy, dq * y + c.q(x) * dy])
    }
}

/// Ai on a custom interval.
pub fn airy_on(lo: f64, hi: f64) -> Result<DecayingSolution, SpecialError> {
    DecayingSolution::build("Ai", Coefficient::Linear, lo, hi, "ai(0)")
}

/// v(s) = U(0, √2 s) on a custom interval.
pub fn pcf_on(lo: f64, hi: f64) -> Result<DecayingSolution, SpecialError> {
    DecayingSolution::build("U0", Coefficient::Quadratic, lo, hi, "v(0)")
}

pub fn airy() -> &'static Arc<DecayingSolution> {
    static A: OnceLock<Arc<DecayingSolution>> = OnceLock::new();
    A.get_or_init(|| Arc::new(airy_on(-10.0, 10.0).expect("default Airy domain")))
}

pub fn pcf() -> &'static Arc<DecayingSolution> {
    static V: OnceLock<Arc<DecayingSolution>> = OnceLock::new();
    V.get_or_init(|| Arc::new(pcf_on(0.0, 10.0).expect("default parabolic-cylinder domain")))
}

/// (Ai, Ai′, Ai″) on [−10, 10].
pub fn airy_ai(y: f64) -> Result<[f64; 3], SpecialError> {
    airy().eval(y)
}

/// (v, v̇, v̈) for v(s) = U(0, √2 s) on [0, 10].
pub fn pcf_u0(s: f64) -> Result<[f64; 3], SpecialError> {
    pcf().eval(s)
}

/// Registration handles for use with `ScalarField::compose`.
pub fn airy_univariate() -> Arc<dyn Univariate> {
    airy().clone()
}

pub fn pcf_univariate() -> Arc<dyn Univariate> {
    pcf().clone()
}

pub fn airy_prime_univariate() -> Arc<dyn Univariate> {
    Arc::new(FirstDerivative::new(airy().clone()))
}

pub fn pcf_prime_univariate() -> Arc<dyn Univariate> {
    Arc::new(FirstDerivative::new(pcf().clone()))
}

/// Smallest s* ≥ 0 with v(s) < 1 for all s > s*, bisected to 1e-10.
pub fn domain_threshold_u_less_one() -> f64 {
    let v = |s: f64| pcf_u0(s).expect("inside domain")[0];
    let (lo, hi) = pcf().domain();
    // last grid point where v ≥ 1, scanning down from the far end
    let n = 10_000;
    let step = (hi - lo) / n as f64;
    let last = (0..=n).rev().map(|k| lo + step * k as f64).find(|&s| v(s) >= 1.0);
    let Some(a) = last else { return lo };
    if a >= hi {
        return hi;
    }
    let (mut a, mut b) = (a, (a + step).min(hi));
    while b - a > 1e-11 {
        let m = 0.5 * (a + b);
        if v(m) >= 1.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests;
