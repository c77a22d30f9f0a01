use serde::Serialize;

/// Coefficient q in y'' = q(t)·y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Coefficient {
    /// q(t) = t
    Linear,
    /// q(t) = t²
    Quadratic,
}

impl Coefficient {
    pub fn q(self, t: f64) -> f64 {
        match self {
            Coefficient::Linear => t,
            Coefficient::Quadratic => t * t,
        }
    }

    // Taylor coefficients of q around t0.
    fn local(self, t0: f64) -> [f64; 3] {
        match self {
            Coefficient::Linear => [t0, 1.0, 0.0],
            Coefficient::Quadratic => [t0 * t0, 2.0 * t0, 1.0],
        }
    }
}

const TAYLOR_DEGREE: usize = 30;
const MAX_STEP: f64 = 0.5;

#[derive(Clone, Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    center: f64,
    coeffs: Vec<f64>,
}

impl Segment {
    fn eval(&self, t: f64) -> (f64, f64) {
        let u = t - self.center;
        let mut y = 0.0;
        let mut dy = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            y = y * u + c;
            if k > 0 {
                dy = dy * u + k as f64 * c;
            }
        }
        (y, dy)
    }
}

/// Dense solution of y'' = q(t)·y on a closed interval.
///
/// Each step stores the full Taylor polynomial about its left node, so lookups
/// evaluate a polynomial instead of interpolating. y'' always comes from the ODE.
#[derive(Clone, Debug)]
pub struct ODESolution1D {
    pub domain: (f64, f64),
    pub coefficient: Coefficient,
    pub tolerance: f64,
    segments: Vec<Segment>,
}

fn taylor_coeffs(coef: Coefficient, t0: f64, y: f64, dy: f64) -> Vec<f64> {
    let q = coef.local(t0);
    let mut a = vec![0.0; TAYLOR_DEGREE + 1];
    a[0] = y;
    a[1] = dy;
    for k in 0..=TAYLOR_DEGREE - 2 {
        let mut s = 0.0;
        for (j, qj) in q.iter().enumerate() {
            if j <= k {
                s += qj * a[k - j];
            }
        }
        a[k + 2] = s / ((k + 2) * (k + 1)) as f64;
    }
    a
}

// Largest step whose truncated tail stays below tol relative to the solution size.
fn step_size(a: &[f64], tol: f64) -> f64 {
    let scale = a[0].abs().max(a[1].abs()).max(f64::MIN_POSITIVE);
    let mut h = MAX_STEP;
    for k in [TAYLOR_DEGREE - 1, TAYLOR_DEGREE] {
        let c = a[k].abs() / scale;
        if c > 0.0 {
            h = h.min(0.8 * (tol / c).powf(1.0 / k as f64));
        }
    }
    h
}

impl ODESolution1D {
    /// Integrate from (t_start, y, y') to t_end, in either direction.
    pub fn integrate(coef: Coefficient, t_start: f64, y: f64, dy: f64, t_end: f64, tol: f64) -> Self {
        let dir = if t_end >= t_start { 1.0 } else { -1.0 };
        let mut segs = Vec::new();
        let (mut t, mut y, mut dy) = (t_start, y, dy);
        while (t_end - t) * dir > 0.0 {
            let a = taylor_coeffs(coef, t, y, dy);
            let h = step_size(&a, tol).min((t_end - t).abs());
            let t1 = if (t_end - t).abs() - h < 1e-14 { t_end } else { t + dir * h };
            let seg = Segment { lo: t.min(t1), hi: t.max(t1), center: t, coeffs: a };
            (y, dy) = seg.eval(t1);
            segs.push(seg);
            t = t1;
        }
        if dir < 0.0 {
            segs.reverse();
        }
        if segs.is_empty() {
            segs.push(Segment { lo: t_start, hi: t_start, center: t_start, coeffs: vec![y, dy] });
        }
        let domain = (t_start.min(t_end), t_start.max(t_end));
        ODESolution1D { domain, coefficient: coef, tolerance: tol, segments: segs }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.domain.0 && t <= self.domain.1
    }

    /// (y, y', y'') at t; None outside the domain.
    pub fn eval(&self, t: f64) -> Option<[f64; 3]> {
        if !self.contains(t) {
            return None;
        }
        let i = self.segments.partition_point(|s| s.hi < t).min(self.segments.len() - 1);
        let (y, dy) = self.segments[i].eval(t);
        Some([y, dy, self.coefficient.q(t) * y])
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    pub(crate) fn scaled(mut self, c: f64) -> Self {
        for s in &mut self.segments {
            for a in &mut s.coeffs {
                *a *= c;
            }
        }
        self
    }

    pub(crate) fn restricted(mut self, lo: f64, hi: f64) -> Self {
        self.segments.retain(|s| s.hi >= lo && s.lo <= hi);
        self.domain = (lo.max(self.domain.0), hi.min(self.domain.1));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_output_matches_tighter_integration() {
        // even solution, checked against a tighter re-integration
        let coarse = ODESolution1D::integrate(Coefficient::Quadratic, 0.0, 1.0, 0.0, 3.0, 1e-12);
        let fine = ODESolution1D::integrate(Coefficient::Quadratic, 0.0, 1.0, 0.0, 3.0, 1e-15);
        for k in 0..=60 {
            let t = 0.05 * k as f64;
            let a = coarse.eval(t).unwrap();
            let b = fine.eval(t).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-10 * b[0].abs(), "t={t}");
            assert!((a[1] - b[1]).abs() < 1e-10 * b[1].abs().max(1.0), "t={t}");
        }
    }

    #[test]
    fn linear_step_is_exact_for_polynomial_data() {
        // q = t, y(0)=0, y'(0)=1: y = t + t⁴/12 + ... series check of the first terms.
        let a = taylor_coeffs(Coefficient::Linear, 0.0, 0.0, 1.0);
        assert_eq!(a[1], 1.0);
        assert!((a[4] - 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(a[2], 0.0);
        assert_eq!(a[3], 0.0);
    }

    #[test]
    fn backward_integration_matches_forward() {
        let f = ODESolution1D::integrate(Coefficient::Linear, -2.0, 0.3, -0.1, 2.0, 1e-13);
        let end = f.eval(2.0).unwrap();
        let b = ODESolution1D::integrate(Coefficient::Linear, 2.0, end[0], end[1], -2.0, 1e-13);
        let start = b.eval(-2.0).unwrap();
        assert!((start[0] - 0.3).abs() < 1e-10);
        assert!((start[1] + 0.1).abs() < 1e-10);
    }
}
