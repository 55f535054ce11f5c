//! Tolerances and residual conventions shared by every check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const DEFAULT_RTOL: f64 = 1e-8;
pub const DEFAULT_ATOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
        }
    }
}

impl Tolerance {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol }
    }

    /// `|a - b| <= atol + rtol * max(|a|, |b|)`
    pub fn approx_eq(&self, a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= self.atol + self.rtol * a.norm().max(b.norm())
    }
}

/// `|lhs - rhs| / max(1, |lhs|, |rhs|)`
pub fn scaled_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / 1f64.max(lhs.norm()).max(rhs.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_is_absolute_below_one_and_relative_above() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert_eq!(scaled_residual(c(0.5), c(0.25)), 0.25);
        assert_eq!(scaled_residual(c(1000.0), c(999.0)), 1e-3);
        assert_eq!(scaled_residual(c(3.0), c(3.0)), 0.0);
    }

    #[test]
    fn approx_eq_uses_both_bounds() {
        let tol = Tolerance::default();
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!(tol.approx_eq(c(0.0), c(5e-11)));
        assert!(!tol.approx_eq(c(0.0), c(5e-10)));
        assert!(tol.approx_eq(c(1e6), c(1e6 + 1e-3)));
        assert!(!tol.approx_eq(c(1e6), c(1e6 + 1.0)));
    }
}
