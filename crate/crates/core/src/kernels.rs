//! Closed-form densities, kernels and weight functions.
//!
//! Excursion quantities are written for a unit-length excursion unless the
//! function name carries `_len`, in which case the excursion has length `T`
//! (a Bessel-3 bridge from 0 to 0 over `[0, T]`). Products that can underflow
//! are accumulated in log space.

use std::f64::consts::PI;

use crate::error::{domain, usage, Result};
use crate::special::{log_gamma, tricomi_psi, PsiParams};
use crate::types::{validate_atoms, Atom, ProcessKind, TimeGrid};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Transition density `p_t(x, y)` of `X`.
pub fn x_transition(t: f64, x: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("x_transition needs t > 0, got {t}"));
    }
    if !(x >= 0.0 && y >= 0.0) {
        return domain("x_transition needs x, y >= 0");
    }
    let t2 = t * t;
    let den = (y - x) * (y - x) + 2.0 * (x + y) * t2 + t2 * t2;
    Ok(2.0 * t * y.sqrt() / (PI * den))
}

/// `p_s(a², b²)` as a difference of two Cauchy kernels in `b`.
pub fn x_transition_factored(s: f64, a: f64, b: f64) -> Result<f64> {
    if !(s > 0.0) {
        return domain(format!("x_transition_factored needs s > 0, got {s}"));
    }
    if !(a > 0.0) {
        return domain("x_transition_factored needs a > 0; use x_transition at the origin");
    }
    if !(b >= 0.0) {
        return domain("x_transition_factored needs b >= 0");
    }
    let s2 = s * s;
    Ok((s / (s2 + (b - a) * (b - a)) - s / (s2 + (b + a) * (b + a))) / (2.0 * PI * a))
}

/// Density of `√X_s` at `b` given `√X_0 = a`: `2b p_s(a², b²)`.
///
/// Written in the product form, which is free of cancellation at `a = 0`.
#[inline]
pub fn x_root_transition(s: f64, a: f64, b: f64) -> f64 {
    let s2 = s * s;
    let lo = s2 + (b - a) * (b - a);
    let hi = s2 + (b + a) * (b + a);
    4.0 * s * b * b / (PI * lo * hi)
}

/// `ℓ_t(y) = (2πt³)^{−1/2} y e^{−y²/(2t)} 1{y > 0}`.
pub fn ell(t: f64, y: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("ell needs t > 0, got {t}"));
    }
    Ok(log_ell(t, y).exp())
}

fn log_ell(t: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return f64::NEG_INFINITY;
    }
    -LN_SQRT_2PI - 1.5 * t.ln() + y.ln() - y * y / (2.0 * t)
}

/// Killed heat kernel `g_t(y₁, y₂)`.
pub fn g_kernel(t: f64, y1: f64, y2: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("g_kernel needs t > 0, got {t}"));
    }
    Ok(log_g(t, y1, y2).exp())
}

fn log_g(t: f64, y1: f64, y2: f64) -> f64 {
    if y1 <= 0.0 || y2 <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let d = y1 - y2;
    -0.5 * (2.0 * PI * t).ln() - d * d / (2.0 * t) + (-(-2.0 * y1 * y2 / t).exp_m1()).ln()
}

/// Joint density of `(B^ex_{t₁}, …, B^ex_{t_d})` for interior times.
pub fn excursion_fdd(times: &TimeGrid, y: &[f64]) -> Result<f64> {
    let t = times.as_slice();
    if y.len() != t.len() {
        return usage(format!("excursion_fdd got {} values for {} times", y.len(), t.len()));
    }
    if !(t[0] > 0.0 && times.last() < 1.0) {
        return domain("excursion_fdd needs all times strictly inside (0, 1)");
    }
    if y.iter().any(|&v| v <= 0.0) {
        return Ok(0.0);
    }
    let d = t.len();
    let mut log = 0.5 * (8.0 * PI).ln() + log_ell(t[0], y[0]) + log_ell(1.0 - t[d - 1], y[d - 1]);
    for k in 0..d - 1 {
        log += log_g(t[k + 1] - t[k], y[k], y[k + 1]);
    }
    Ok(log.exp())
}

/// Transition density of the unit excursion from `(s, x)` to `(t, y)`.
pub fn excursion_transition(s: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    if !(t < 1.0) {
        return domain("excursion_transition needs t < 1");
    }
    excursion_transition_len(1.0, s, t, x, y)
}

/// Transition density of an excursion of length `len` from `(s, x)` to `(t, y)`.
pub fn excursion_transition_len(len: f64, s: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    if !(s >= 0.0 && s < t && t < len) {
        return domain(format!("excursion transition needs 0 <= s < t < {len}, got s = {s}, t = {t}"));
    }
    if s == 0.0 {
        if x != 0.0 {
            return domain("the excursion starts at 0");
        }
        return Ok(log_excursion_marginal_len(len, t, y).exp());
    }
    if !(x > 0.0) {
        return domain("x = 0 is only admissible at s = 0");
    }
    Ok(log_excursion_step_len(len, s, t, x, y).exp())
}

/// Log-density of `B_t` for an excursion of length `len` (a χ₃ law).
pub(crate) fn log_excursion_marginal_len(len: f64, t: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let var = t * (len - t) / len;
    0.5 * (2.0 / PI).ln() + 2.0 * y.ln() - 1.5 * var.ln() - y * y / (2.0 * var)
}

/// Log of `g_{t−s}(x, y) ℓ_{len−t}(y) / ℓ_{len−s}(x)`, grouped so that the
/// large Gaussian exponents cancel before exponentiation.
pub(crate) fn log_excursion_step_len(len: f64, s: f64, t: f64, x: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let dt = t - s;
    let rem_s = len - s;
    let rem_t = len - t;
    let d = x - y;
    let expo = -d * d / (2.0 * dt) - y * y / (2.0 * rem_t) + x * x / (2.0 * rem_s);
    -0.5 * (2.0 * PI * dt).ln() + expo + (-(-2.0 * x * y / dt).exp_m1()).ln() + (y / x).ln() + 1.5 * (rem_s / rem_t).ln()
}

/// `φ_ν(x)` for a finite atomic `ν`.
pub fn phi_nu_discrete(atoms: &[Atom], x: f64) -> Result<f64> {
    validate_atoms(atoms)?;
    if !(x > 0.0) {
        return domain("phi_nu needs x > 0");
    }
    Ok(log_weighted_atoms(atoms, x, 0.0).exp())
}

/// `ln Σ wᵢ (√x/√(2π)) vᵢ^{−3/2} exp(x/2 − x/(2vᵢ) − c₀x)`, via log-sum-exp.
fn log_weighted_atoms(atoms: &[Atom], x: f64, c0: f64) -> f64 {
    let base = 0.5 * x.ln() - LN_SQRT_2PI;
    let terms: Vec<f64> = atoms
        .iter()
        .map(|a| a.weight.ln() - 1.5 * a.v.ln() + 0.5 * x * (1.0 - 1.0 / a.v) - c0 * x)
        .collect();
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    base + m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Right-hand-side weight density `φ(x)` for each process kind.
pub fn dual_weight(kind: &ProcessKind, x: f64) -> Result<f64> {
    weighted_initial_density(kind, x, 0.0)
}

/// `φ(x) e^{−c₀ x}`, evaluated without intermediate overflow.
pub fn weighted_initial_density(kind: &ProcessKind, x: f64, c0: f64) -> Result<f64> {
    kind.validate()?;
    if !(x > 0.0) {
        return domain("dual weight needs x > 0");
    }
    let log = match kind {
        ProcessKind::Excursion => 0.5 * x.ln() - LN_SQRT_2PI - c0 * x,
        ProcessKind::BesselMeander { delta } => {
            let h = 0.5 * delta;
            (h - 1.0) * x.ln() - h * std::f64::consts::LN_2 - log_gamma(h)? - c0 * x
        }
        ProcessKind::BetaMeander { alpha, beta } => {
            let psi = tricomi_psi(PsiParams::new(*beta, 2.5 - alpha, 0.5 * x)?)?;
            log_gamma(alpha + beta)? - LN_SQRT_2PI - log_gamma(*alpha)? + psi.ln() + 0.5 * x.ln() - c0 * x
        }
        ProcessKind::DiscreteNu { atoms } => log_weighted_atoms(atoms, x, c0),
    };
    Ok(log.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, integrate_semiinfinite_scaled, QuadSettings};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    fn tight() -> QuadSettings {
        QuadSettings { rel_tol: 1e-12, abs_tol: 1e-15, ..Default::default() }
    }

    #[test]
    fn x_transition_values() {
        assert_eq!(x_transition(1.3, 2.0, 0.0).unwrap(), 0.0);
        assert!(rel(x_transition(1.0, 0.0, 1.0).unwrap(), 1.0 / (2.0 * PI)) < 1e-15);
        assert!(x_transition(0.0, 1.0, 1.0).is_err());
        assert!(x_transition(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn x_transition_normalized() {
        let r = integrate_semiinfinite_scaled(|y| x_transition(0.7, 2.3, y), 4.0, &tight()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn factored_form_agrees() {
        assert!(rel(x_transition_factored(1.0, 1.0, 1.0).unwrap(), x_transition(1.0, 1.0, 1.0).unwrap()) < 1e-15);
        let f = x_transition_factored(0.5, 1.2, 0.3).unwrap();
        let d = x_transition(0.5, 1.44, 0.09).unwrap();
        assert!(rel(f, d) < 1e-14, "{f} vs {d}");
        assert!(x_transition_factored(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn ell_values() {
        assert_eq!(ell(0.5, -1.0).unwrap(), 0.0);
        assert!(rel(ell(0.5, 1.0).unwrap(), 2.0 * (-1.0f64).exp() / PI.sqrt()) < 1e-14);
        assert!(ell(0.0, 1.0).is_err());
    }

    #[test]
    fn ell_is_first_passage_density_in_time() {
        // t ↦ ℓ_t(1) is the hitting-time density of level 1; substitute t = 1/u².
        let r = integrate(|u: f64| if u == 0.0 { Ok(0.0) } else { Ok(ell(1.0 / (u * u), 1.0)? * 2.0 / (u * u * u)) }, 0.0, 40.0, &tight())
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn g_kernel_properties() {
        assert_eq!(g_kernel(1.0, 0.7, 0.0).unwrap(), 0.0);
        assert_eq!(g_kernel(0.4, 0.3, 1.1).unwrap(), g_kernel(0.4, 1.1, 0.3).unwrap());
        let r = integrate_semiinfinite_scaled(|y| g_kernel(1.0, 1.0, y), 2.0, &tight()).unwrap();
        // P(BM from 1 stays positive up to time 1) = 2Φ(1) − 1.
        let want = statrs::function::erf::erf(1.0 / 2f64.sqrt());
        assert!((r.value - want).abs() < 1e-8);
        assert!((want - 0.682_689_492_1).abs() < 1e-10);
    }

    #[test]
    fn fdd_values() {
        let g = TimeGrid::new(vec![0.5]).unwrap();
        let got = excursion_fdd(&g, &[1.0]).unwrap();
        let want = 8.0 * 2f64.sqrt() / PI.sqrt() * (-2.0f64).exp();
        assert!(rel(got, want) < 1e-14);
        assert!((want - 0.863_855_464_2).abs() < 1e-10);
        let g = TimeGrid::new(vec![0.3]).unwrap();
        let r = integrate_semiinfinite_scaled(|y| excursion_fdd(&g, &[y]), 1.0, &tight()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        assert!(excursion_fdd(&g, &[1.0, 2.0]).is_err());
        assert!(excursion_fdd(&TimeGrid::new(vec![0.0, 0.5]).unwrap(), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn fdd_time_reversal() {
        let fwd = TimeGrid::new(vec![0.15, 0.4, 0.8]).unwrap();
        let bwd = TimeGrid::new(vec![0.2, 0.6, 0.85]).unwrap();
        let y = [0.4, 1.3, 0.7];
        let a = excursion_fdd(&fwd, &y).unwrap();
        let b = excursion_fdd(&bwd, &[0.7, 1.3, 0.4]).unwrap();
        assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn excursion_transition_branches_and_chain() {
        let (t, y) = (0.35, 0.8);
        let direct = (8.0 * PI).sqrt() * ell(t, y).unwrap() * ell(1.0 - t, y).unwrap();
        assert!(rel(excursion_transition(0.0, t, 0.0, y).unwrap(), direct) < 1e-13);

        let grid = TimeGrid::new(vec![0.3, 0.7]).unwrap();
        for &(y1, y2) in &[(0.5, 0.9), (1.2, 0.3), (0.05, 2.0)] {
            let chain = excursion_transition(0.0, 0.3, 0.0, y1).unwrap() * excursion_transition(0.3, 0.7, y1, y2).unwrap();
            let joint = excursion_fdd(&grid, &[y1, y2]).unwrap();
            assert!(rel(chain, joint) < 1e-12);
        }

        let r = integrate_semiinfinite_scaled(|y| excursion_transition(0.2, 0.6, 1.0, y), 1.0, &tight()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);

        assert!(excursion_transition(0.5, 0.5, 1.0, 1.0).is_err());
        assert!(excursion_transition(0.2, 1.0, 1.0, 1.0).is_err());
        assert!(excursion_transition(0.2, 0.5, 0.0, 1.0).is_err());
        assert!(excursion_transition(0.0, 0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn transition_len_normalized() {
        let r = integrate_semiinfinite_scaled(|y| excursion_transition_len(3.0, 0.4, 1.0, 0.7, y), 1.0, &tight()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        let r = integrate_semiinfinite_scaled(|y| excursion_transition_len(3.0, 0.0, 1.0, 0.0, y), 1.0, &tight()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weights() {
        let x = 1.0;
        assert!(rel(dual_weight(&ProcessKind::Excursion, x).unwrap(), 1.0 / (2.0 * PI).sqrt()) < 1e-15);
        for &x in &[0.1, 1.0, 7.5] {
            let m = dual_weight(&ProcessKind::bessel(1.0).unwrap(), x).unwrap();
            assert!(rel(m, 1.0 / (x.sqrt() * (2.0 * PI).sqrt())) < 1e-14);
        }
        for &delta in &[0.5, 1.0, 2.0] {
            for &x in &[0.1, 1.0, 10.0] {
                let a = 0.5 * delta;
                let beta = dual_weight(&ProcessKind::beta(a, 1.5 - a).unwrap(), x).unwrap();
                let bes = dual_weight(&ProcessKind::bessel(delta).unwrap(), x).unwrap();
                assert!(rel(beta, bes) < 1e-10, "delta {delta} x {x}: {beta} vs {bes}");
            }
        }
    }

    #[test]
    fn phi_nu_values() {
        let one = [Atom { v: 1.0, weight: 1.0 }];
        for &x in &[0.3, 2.0, 900.0] {
            assert!(rel(phi_nu_discrete(&one, x).unwrap(), x.sqrt() / (2.0 * PI).sqrt()) < 1e-13);
        }
        // √2 e · e^{−2} · 2^{3/2} / √(2π) = 4 e^{−1} / √(2π)
        let half = [Atom { v: 0.5, weight: 1.0 }];
        let want = 4.0 * (-1.0f64).exp() / (2.0 * PI).sqrt();
        assert!(rel(phi_nu_discrete(&half, 2.0).unwrap(), want) < 1e-14);
        assert!((want - 0.587_050_652_7).abs() < 1e-10);

        let (v1, v2) = (0.2, 0.7);
        let mix = [Atom { v: v1, weight: 0.5 }, Atom { v: v2, weight: 0.5 }];
        for &x in &[0.5, 3.0] {
            let lhs = phi_nu_discrete(&mix, x).unwrap();
            let rhs = 0.5 * phi_nu_discrete(&[Atom { v: v1, weight: 1.0 }], x).unwrap()
                + 0.5 * phi_nu_discrete(&[Atom { v: v2, weight: 1.0 }], x).unwrap();
            assert!(rel(lhs, rhs) < 1e-14);
        }
        assert!(phi_nu_discrete(&[Atom { v: 0.0, weight: 1.0 }], 1.0).is_err());
    }
}
