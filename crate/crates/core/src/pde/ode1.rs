use super::PdeError;

/// s^{1/3}(s+c) − AH.
pub fn ode1_residual(a: f64, c: f64, h: f64, s: f64) -> f64 {
    s.cbrt() * (s + c) - a * h
}

fn slope(c: f64, s: f64) -> f64 {
    (4.0 * s + c) / (3.0 * s.cbrt().powi(2))
}

/// Positive root s of AH = s^{1/3}(s+c) on the branch where the right side increases
/// (s > max(0, −c/4)). Newton steps are kept inside a sign-change bracket and replaced
/// by bisection whenever they leave it. For A = 0 the root is s = −c (requires c < 0).
pub fn solve_s_of_h(a: f64, c: f64, h: f64) -> Result<f64, PdeError> {
    let fail = || PdeError::Root { a, c, h };
    if !(a.is_finite() && c.is_finite() && h.is_finite()) {
        return Err(fail());
    }
    if a == 0.0 || h == 0.0 {
        return if c < 0.0 { Ok(-c) } else { Err(fail()) };
    }
    let f = |s: f64| ode1_residual(a, c, h, s);
    let mut lo = (-c / 4.0).max(0.0);
    let flo = f(lo);
    if flo == 0.0 && lo > 0.0 {
        return Ok(lo);
    }
    if flo > 0.0 || (lo == 0.0 && flo == 0.0) {
        return Err(fail());
    }
    let mut hi = (2.0 * lo).max(1.0);
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(fail());
        }
    }
    let mut s = hi;
    for _ in 0..200 {
        let fs = f(s);
        if fs == 0.0 {
            return Ok(s);
        }
        if fs < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - fs / slope(c, s);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - s).abs() <= 4.0 * f64::EPSILON * s.abs() || hi - lo <= 4.0 * f64::EPSILON * hi {
            // polish: pick the better of the two bracket ends and the iterate
            return Ok([next, s, lo.max(f64::MIN_POSITIVE), hi].into_iter().min_by(|x, y| f(*x).abs().total_cmp(&f(*y).abs())).unwrap_or(s));
        }
        s = next;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_roots() {
        assert!((solve_s_of_h(1.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((solve_s_of_h(1.0, 2.0, 3.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn truncated_case_is_constant() {
        for k in 0..100 {
            let h = 0.1 + 9.9 * k as f64 / 99.0;
            assert_eq!(solve_s_of_h(0.0, -1.0, h).unwrap(), 1.0);
        }
    }

    #[test]
    fn rejects_missing_root() {
        assert!(solve_s_of_h(1.0, 1.0, -1.0).is_err());
        assert!(solve_s_of_h(0.0, 1.0, 1.0).is_err());
        // below the minimum of s^{1/3}(s − 1)
        assert!(solve_s_of_h(1.0, -1.0, -1.0).is_err());
    }

    #[test]
    fn negative_target_on_increasing_branch() {
        let s = solve_s_of_h(1.0, -1.0, -0.3).unwrap();
        assert!(s > 0.25 && s < 1.0);
        assert!(ode1_residual(1.0, -1.0, -0.3, s).abs() < 1e-14);
    }
}
