//! Real special functions used by the weight functions and constants.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{integrate, integrate_tail, QuadSettings, TailPolicy};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const SERIES_TERMS: usize = 40;

/// `ζ(k) − 1` for `k = 2..SERIES_TERMS+2`, by Euler–Maclaurin summation.
fn zeta_minus_one() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B_{2j} / (2j)!
        const B: [f64; 6] =
            [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0, 1.0 / 47900160.0, -691.0 / 1307674368000.0];
        let n = 12.0f64;
        (2..SERIES_TERMS + 2)
            .map(|k| {
                let k = k as f64;
                let mut head: f64 = (2..12).map(|m| (m as f64).powf(-k)).sum();
                head += n.powf(1.0 - k) / (k - 1.0) + 0.5 * n.powf(-k);
                let mut rising = k;
                for (j, b) in B.iter().enumerate() {
                    head += b * rising * n.powf(-k - (2 * j + 1) as f64);
                    rising *= (k + (2 * j + 1) as f64) * (k + (2 * j + 2) as f64);
                }
                head
            })
            .collect()
    })
}

/// `ln Γ(2 + z)` for `|z| ≤ 1/2` from its Taylor series; accurate in the
/// relative sense down to `z = 0`.
fn log_gamma_near_two(z: f64) -> f64 {
    let zeta = zeta_minus_one();
    let mut sum = (1.0 - EULER_GAMMA) * z;
    let mut pow = -z;
    for (i, c) in zeta.iter().enumerate() {
        let k = (i + 2) as f64;
        pow *= -z;
        sum += c * pow / k;
    }
    sum
}

fn log_gamma_stirling(x: f64) -> f64 {
    const C: [f64; 7] =
        [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0];
    let r = 1.0 / (x * x);
    let mut series = 0.0;
    for c in C.iter().rev() {
        series = series * r + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series / x
}

/// `ln Γ(x)` for finite `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return domain(format!("log_gamma requires a finite positive argument, got {x}"));
    }
    Ok(if x < 0.5 {
        log_gamma_near_two(x) - x.ln_1p() - x.ln()
    } else if x < 1.5 {
        log_gamma_near_two(x - 1.0) - (x - 1.0).ln_1p()
    } else if x < 2.5 {
        log_gamma_near_two(x - 2.0)
    } else if x < 10.0 {
        let mut shift = 0.0;
        let mut y = x;
        while y < 10.0 {
            shift += y.ln();
            y += 1.0;
        }
        log_gamma_stirling(y) - shift
    } else {
        log_gamma_stirling(x)
    })
}

/// `Γ(x)` for finite `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(log_gamma(x)?.exp())
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta_function(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return domain(format!("beta_function requires positive arguments, got ({a}, {b})"));
    }
    Ok((log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?).exp())
}

/// Parameters of the confluent hypergeometric function of the second kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiParams {
    pub alpha: f64,
    pub beta: f64,
    pub x: f64,
}

impl PsiParams {
    pub fn new(alpha: f64, beta: f64, x: f64) -> Result<Self> {
        let p = Self { alpha, beta, x };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return domain(format!("psi requires alpha > 0, got {}", self.alpha));
        }
        if !self.beta.is_finite() {
            return domain("psi requires a finite beta");
        }
        if !(self.x.is_finite() && self.x > 0.0) {
            return domain(format!("psi requires x > 0, got {}", self.x));
        }
        Ok(())
    }
}

fn psi_settings() -> QuadSettings {
    QuadSettings { rel_tol: 1e-13, abs_tol: 0.0, max_subdivisions: 4000, tail: TailPolicy::AdaptiveDoubling }
}

/// Tricomi's `ψ(α, β, x) = Γ(α)⁻¹ ∫₀^∞ e^{−xu} u^{α−1} (1+u)^{β−α−1} du`.
///
/// For `x < 1` the range is split at `u = 1`. On `[0, 1]` the substitution `u = r^{1/α}`
/// removes the power singularity when `α < 1`; on `[1, ∞)` the substitution
/// `u = e^z − 1` turns the exponential cutoff at `u ~ 1/x` into a
/// doubly-exponential decay in `z`.
pub fn tricomi_psi(p: PsiParams) -> Result<f64> {
    p.validate()?;
    let PsiParams { alpha: a, beta: b, x } = p;
    if x >= 1.0 {
        return psi_rescaled(a, b, x);
    }
    let settings = psi_settings();
    let head_exp = b - a - 1.0;

    let head = if a < 1.0 {
        let inv = 1.0 / a;
        integrate(
            |r: f64| {
                let u = r.powf(inv);
                Ok((-x * u + head_exp * u.ln_1p()).exp() * inv)
            },
            0.0,
            1.0,
            &settings,
        )?
    } else {
        integrate(
            |u: f64| {
                if u == 0.0 {
                    return Ok(if a == 1.0 { 1.0 } else { 0.0 });
                }
                Ok((-x * u + (a - 1.0) * u.ln() + head_exp * u.ln_1p()).exp())
            },
            0.0,
            1.0,
            &settings,
        )?
    };

    let log_integrand = move |z: f64| -x * z.exp_m1() + (a - 1.0) * z.exp_m1().ln() + (b - a) * z;
    let z0 = std::f64::consts::LN_2;
    let z1 = (1.0 + (1.0 + a.abs() + b.abs()) / x).ln() + 3.0;
    let body = integrate(|z: f64| Ok(log_integrand(z).exp()), z0, z1, &settings)?;
    let body_settings = QuadSettings { abs_tol: settings.rel_tol * (head.value + body.value), ..settings };
    let tail = integrate_tail(|z: f64| Ok(log_integrand(z).exp()), z1, 1.0, &body_settings)?;

    let total = head.value + body.value + tail.value;
    let value = (total.ln() - log_gamma(a)?).exp();
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Domain(format!("psi({a}, {b}, {x}) is not representable")));
    }
    Ok(value)
}

/// For `x ≥ 1`: `ψ = x^{−α} Γ(α)⁻¹ ∫₀^∞ e^{−τ} τ^{α−1} (1 + τ/x)^{β−α−1} dτ`.
/// Without the rescaling the mass sits in a layer of width `1/x` at the
/// origin, which the first quadrature panels cannot see for large `x`.
fn psi_rescaled(a: f64, b: f64, x: f64) -> Result<f64> {
    let settings = psi_settings();
    let c = b - a - 1.0;
    let head = if a < 1.0 {
        let inv = 1.0 / a;
        integrate(
            |r: f64| {
                let tau = r.powf(inv);
                Ok((-tau + c * (tau / x).ln_1p()).exp() * inv)
            },
            0.0,
            1.0,
            &settings,
        )?
    } else {
        integrate(
            |tau: f64| {
                if tau == 0.0 {
                    return Ok(if a == 1.0 { 1.0 } else { 0.0 });
                }
                Ok((-tau + (a - 1.0) * tau.ln() + c * (tau / x).ln_1p()).exp())
            },
            0.0,
            1.0,
            &settings,
        )?
    };
    let tail_settings = QuadSettings { abs_tol: settings.rel_tol * head.value, ..settings };
    let tail = integrate_tail(
        |tau: f64| Ok((-tau + (a - 1.0) * tau.ln() + c * (tau / x).ln_1p()).exp()),
        1.0,
        1.0 + a.abs() + c.abs(),
        &tail_settings,
    )?;
    let value = ((head.value + tail.value).ln() - a * x.ln() - log_gamma(a)?).exp();
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Domain(format!("psi({a}, {b}, {x}) is not representable")));
    }
    Ok(value)
}

/// `c_{δ,δ'} = 2^{δ/2} Γ((δ+δ')/2) / Γ(δ'/2)`.
pub fn bessel_meander_constant(delta: f64, delta_prime: f64) -> Result<f64> {
    if !(delta > 0.0 && delta_prime > 0.0) {
        return domain(format!(
            "bessel_meander_constant requires positive dimensions, got ({delta}, {delta_prime})"
        ));
    }
    Ok((0.5 * delta * std::f64::consts::LN_2 + log_gamma(0.5 * (delta + delta_prime))? - log_gamma(0.5 * delta_prime)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn log_gamma_half_integers() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert!((log_gamma(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!((log_gamma(1.5).unwrap() - (PI.sqrt() / 2.0).ln()).abs() < 1e-14);
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let mut fact_2n = 1.0f64;
        let mut fact_n = 1.0f64;
        for n in 1..30u32 {
            fact_2n *= (2 * n - 1) as f64 * (2 * n) as f64;
            fact_n *= n as f64;
            let exact = fact_2n.ln() + 0.5 * PI.ln() - (n as f64) * 4f64.ln() - fact_n.ln();
            let got = log_gamma(n as f64 + 0.5).unwrap();
            assert!(rel(got, exact) < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn log_gamma_integers_up_to_100() {
        let mut acc = 0.0f64;
        for n in 2..=100u32 {
            acc += ((n - 1) as f64).ln();
            let got = log_gamma(n as f64).unwrap();
            assert!((got - acc).abs() <= 1e-13 * acc.abs(), "n = {n}");
        }
    }

    #[test]
    fn log_gamma_near_its_zeros() {
        // ln Γ(1 + z) = −γz + ζ(2)z²/2 − ζ(3)z³/3 + …
        for &z in &[1e-9, -1e-9, 1e-5, -3e-6] {
            let z = (1.0 + z) - 1.0;
            let zeta2 = PI * PI / 6.0;
            let want = -EULER_GAMMA * z + zeta2 * z * z / 2.0 - 1.202_056_903_159_594_3 * z * z * z / 3.0;
            assert!(rel(log_gamma(1.0 + z).unwrap(), want) < 1e-13, "z = {z}");
        }
        // ln Γ(2 + z) = (1 − γ)z + (ζ(2) − 1)z²/2 − …
        for &z in &[1e-9, -2e-8] {
            let z = (2.0 + z) - 2.0;
            let want = (1.0 - EULER_GAMMA) * z + (PI * PI / 6.0 - 1.0) * z * z / 2.0;
            assert!(rel(log_gamma(2.0 + z).unwrap(), want) < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn log_gamma_continuous_across_branches() {
        for &x in &[0.5, 1.5, 2.5, 10.0] {
            let lo = log_gamma(x * (1.0 - 1e-15)).unwrap();
            let hi = log_gamma(x).unwrap();
            assert!((lo - hi).abs() < 1e-14 * hi.abs().max(1.0), "x = {x}");
        }
        // Small arguments through the recurrence.
        assert!(rel(log_gamma(1e-3).unwrap(), 6.907_178_885_383_853_7) < 1e-13);
    }

    #[test]
    fn log_gamma_domain() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
        assert!(log_gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn beta_values() {
        assert!((beta_function(1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((beta_function(0.5, 1.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(beta_function(0.0, 1.0).is_err());
        assert!(beta_function(1.0, -2.0).is_err());
    }

    #[test]
    fn beta_against_quadrature() {
        let s = QuadSettings { rel_tol: 1e-13, abs_tol: 0.0, ..Default::default() };
        let q = integrate(|v: f64| Ok(v.powf(-0.5)), 0.0, 1.0, &s).unwrap().value;
        assert!((beta_function(0.5, 1.0).unwrap() - q).abs() < 1e-12);
        let q = integrate(|v: f64| Ok(v.powf(1.5) * (1.0 - v).sqrt()), 0.0, 1.0, &s).unwrap().value;
        assert!(rel(beta_function(2.5, 1.5).unwrap(), q) < 1e-12);
        assert_eq!(beta_function(0.3, 2.7).unwrap(), beta_function(2.7, 0.3).unwrap());
    }

    #[test]
    fn psi_power_law_case() {
        assert!(rel(tricomi_psi(PsiParams::new(1.0, 2.0, 2.0).unwrap()).unwrap(), 0.5) < 1e-12);
        for &b in &[0.5, 1.0, 1.5] {
            for &z in &[0.5, 1.0, 4.0] {
                let got = tricomi_psi(PsiParams::new(b, b + 1.0, z).unwrap()).unwrap();
                let want = z.powf(-b);
                assert!((got - want).abs() <= 1e-10 * want, "beta {b}, z {z}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn psi_exponential_integral_case() {
        // e·E₁(1)
        let got = tricomi_psi(PsiParams::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(rel(got, 0.596_347_362_323_194_1) < 1e-12, "{got}");
    }

    #[test]
    fn psi_decreasing_in_x() {
        let p1 = tricomi_psi(PsiParams::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        let p2 = tricomi_psi(PsiParams::new(1.0, 1.0, 2.0).unwrap()).unwrap();
        assert!(p2 < p1);
    }

    #[test]
    fn psi_large_argument_asymptotics() {
        // ψ(a, b, x) xᵃ = Σ (a)ₙ (a − b + 1)ₙ / (n! (−x)ⁿ)
        for &(a, b) in &[(0.5, 0.5), (1.0, 1.5), (2.3, -0.4)] {
            for &x in &[1e6, 3e8] {
                let got = tricomi_psi(PsiParams::new(a, b, x).unwrap()).unwrap() * x.powf(a);
                let c = a - b + 1.0;
                let want = 1.0 - a * c / x + a * (a + 1.0) * c * (c + 1.0) / (2.0 * x * x);
                assert!((got - want).abs() < 1e-11, "({a}, {b}, {x}): {got}");
            }
        }
    }

    #[test]
    fn psi_continuous_across_rescaling() {
        for &(a, b) in &[(0.3, 2.0), (1.0, 1.0), (4.0, -1.5)] {
            let below = tricomi_psi(PsiParams::new(a, b, 1.0 - 1e-12).unwrap()).unwrap();
            let at = tricomi_psi(PsiParams::new(a, b, 1.0).unwrap()).unwrap();
            assert!(rel(below, at) < 1e-11, "({a}, {b})");
        }
    }

    #[test]
    fn psi_domain() {
        assert!(PsiParams::new(0.0, 1.0, 1.0).is_err());
        assert!(PsiParams::new(1.0, 1.0, 0.0).is_err());
        assert!(tricomi_psi(PsiParams { alpha: -1.0, beta: 0.0, x: 1.0 }).is_err());
    }

    #[test]
    fn meander_constants() {
        assert!(rel(bessel_meander_constant(1.0, 2.0).unwrap(), (PI / 2.0).sqrt()) < 1e-14);
        assert!(rel(bessel_meander_constant(2.0, 1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(bessel_meander_constant(3.0, 1.0).unwrap(), 2.0 * 2f64.sqrt() / PI.sqrt()) < 1e-14);
        assert!(bessel_meander_constant(0.0, 1.0).is_err());
    }
}
