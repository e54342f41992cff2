//! Adaptive Simpson quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{GhError, Result};

/// Every interval is bisected at least this many times before the
/// acceptance test is trusted, so a coarse rule cannot report a spurious
/// zero on a function that vanishes at the first five nodes.
const MIN_DEPTH: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Absolute error target over the whole interval.
    pub abs_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-10, max_subdivisions: 50 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(GhError::param(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_subdivisions < 20 {
            return Err(GhError::param(format!(
                "max_subdivisions must be at least 20, got {}",
                self.max_subdivisions
            )));
        }
        Ok(())
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]`. Swapping the bounds negates the result
/// exactly; `a == b` gives 0.
///
/// A panel is accepted once `|S_left + S_right - S_whole| <= 15 tol`, where
/// `tol` halves with every bisection; the accepted value carries the usual
/// Richardson correction. Exceeding `max_subdivisions` levels returns a
/// convergence error holding the best available estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, q: &QuadratureSpec) -> Result<f64> {
    q.validate()?;
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return adaptive_simpson(f, b, a, q).map(|v| -v);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(GhError::param("integration bounds must be finite"));
    }

    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let mut stack = vec![Panel { a, b, fa, fm, fb, whole: simpson(a, b, fa, fm, fb), tol: q.abs_tol, depth: 0 }];
    let mut total = 0.0;
    let mut compensation = 0.0;
    let mut exhausted = false;

    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if !delta.is_finite() {
            return Err(GhError::Numerical(format!(
                "non-finite integrand on [{}, {}]",
                p.a, p.b
            )));
        }

        let converged = p.depth >= MIN_DEPTH && delta.abs() <= 15.0 * p.tol;
        if converged || p.depth >= q.max_subdivisions {
            exhausted |= !converged;
            // Kahan summation keeps round-off far below abs_tol for many panels.
            let y = left + right + delta / 15.0 - compensation;
            let t = total + y;
            compensation = (t - total) - y;
            total = t;
        } else {
            let tol = 0.5 * p.tol;
            let depth = p.depth + 1;
            stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol, depth });
            stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol, depth });
        }
    }

    if exhausted {
        return Err(GhError::Convergence {
            estimate: total,
            message: format!(
                "subdivision depth {} reached on [{a}, {b}] before tolerance {}",
                q.max_subdivisions, q.abs_tol
            ),
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_transcendentals() {
        let q = QuadratureSpec::default();
        let v = adaptive_simpson(|x| x * x * x, 0.0, 2.0, &q).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let v = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, &q).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let v = adaptive_simpson(|x| (-x * x).exp(), -6.0, 6.0, &q).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn reversed_bounds_negate_exactly() {
        let q = QuadratureSpec::default();
        let f = |x: f64| x.cos() + x;
        let fwd = adaptive_simpson(f, -0.3, 1.7, &q).unwrap();
        let back = adaptive_simpson(f, 1.7, -0.3, &q).unwrap();
        assert_eq!(fwd, -back);
        assert_eq!(adaptive_simpson(f, 0.4, 0.4, &q).unwrap(), 0.0);
    }

    #[test]
    fn singular_integrand_exhausts_budget() {
        let q = QuadratureSpec { abs_tol: 1e-14, max_subdivisions: 20 };
        let err = adaptive_simpson(|x: f64| 1.0 / x.abs().sqrt().max(1e-9), -1.0, 1.0, &q).unwrap_err();
        match err {
            GhError::Convergence { estimate, .. } => assert!(estimate.is_finite()),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_spec() {
        let bad = QuadratureSpec { abs_tol: 0.0, max_subdivisions: 50 };
        assert!(adaptive_simpson(|x| x, 0.0, 1.0, &bad).is_err());
        let shallow = QuadratureSpec { abs_tol: 1e-8, max_subdivisions: 5 };
        assert!(adaptive_simpson(|x| x, 0.0, 1.0, &shallow).is_err());
    }
}
