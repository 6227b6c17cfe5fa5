//! Deterministic evaluation of both sides of the duality identities.
//!
//! The primitives ([`integrate`], [`integrate_semiinfinite`], the piecewise
//! Chebyshev tables) are generic; [`chain`] holds the two transfer-operator
//! recursions and [`dual`] the per-kind left- and right-hand sides.

mod adaptive;
pub mod chain;
pub mod cheb;
pub mod dual;
mod gk;

use serde::{Deserialize, Serialize};

pub use adaptive::{integrate, integrate_partitioned, integrate_semiinfinite, integrate_semiinfinite_scaled, integrate_tail};
pub use chain::{x_chain_expectation, CoefficientChain};
pub use dual::{lhs_fixed_v, lhs_laplace, phi_nu_beta_quadrature, rhs_dual, rhs_fixed_v};

use crate::error::{domain, Result};

/// How a semi-infinite range is closed off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailPolicy {
    /// Integrate `[0, x_max]` only.
    Fixed(f64),
    /// Doubling segments until the contribution is negligible.
    AdaptiveDoubling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub tail: TailPolicy,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, max_subdivisions: 2000, tail: TailPolicy::AdaptiveDoubling }
    }
}

impl QuadSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return domain("quadrature tolerances must be positive");
        }
        if self.max_subdivisions < 10 {
            return domain("max_subdivisions must be at least 10");
        }
        if let TailPolicy::Fixed(x) = self.tail {
            if !(x > 0.0 && x.is_finite()) {
                return domain("fixed tail cutoff must be positive and finite");
            }
        }
        Ok(())
    }

    /// The same settings with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self { rel_tol: self.rel_tol * factor, abs_tol: self.abs_tol * factor, ..*self }
    }
}

/// Value and absolute error bound of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ok(v: f64) -> Result<f64> {
        Ok(v)
    }

    #[test]
    fn semiinfinite_exponential() {
        let r = integrate_semiinfinite(|x| ok((-x).exp()), &QuadSettings::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn semiinfinite_stationary_gamma_weight() {
        let c = (2.0 * PI).sqrt();
        let r = integrate_semiinfinite(|x| ok(x.sqrt() * (-x / 2.0).exp() / c), &QuadSettings::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn semiinfinite_cauchy_tail() {
        let s = QuadSettings { abs_tol: 1e-13, rel_tol: 1e-12, ..Default::default() };
        let r = integrate_semiinfinite(|x| ok(1.0 / (1.0 + x * x)), &s).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-10, "{}", r.value);
        assert!(r.error < 1e-10);
    }

    #[test]
    fn fixed_cutoff_policy() {
        let s = QuadSettings { tail: TailPolicy::Fixed(50.0), ..Default::default() };
        let r = integrate_semiinfinite(|x| ok((-x).exp()), &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let s = QuadSettings { max_subdivisions: 10, rel_tol: 1e-14, abs_tol: 1e-300, ..Default::default() };
        let err = integrate(|x: f64| ok((1.0 / x).sin()), 1e-6, 1.0, &s).unwrap_err();
        assert!(matches!(err, crate::Error::Convergence { .. }));
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let s = QuadSettings { rel_tol: 1e-12, ..Default::default() };
        let r = integrate(|x: f64| ok(1.0 / x.sqrt()), 0.0, 1.0, &s).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(QuadSettings { rel_tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(QuadSettings { max_subdivisions: 3, ..Default::default() }.validate().is_err());
    }
}
