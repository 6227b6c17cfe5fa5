//! Closed-form and independently computed reference values.

use std::f64::consts::PI;

use exdual::kernels::{dual_weight, ell, excursion_fdd, g_kernel, phi_nu_discrete, x_transition};
use exdual::quad::{integrate, integrate_semiinfinite_scaled, phi_nu_beta_quadrature, QuadSettings};
use exdual::special::{tricomi_psi, PsiParams};
use exdual::{Atom, ProcessKind, TimeGrid};
use proptest::prelude::*;
use statrs::function::erf::{erf, erfc};

fn tight() -> QuadSettings {
    QuadSettings { rel_tol: 1e-12, abs_tol: 1e-15, ..Default::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn pointwise_kernel_values() {
    assert!(rel(x_transition(1.0, 0.0, 1.0).unwrap(), 0.159_154_943_1) < 1e-9);
    assert!(rel(ell(0.5, 1.0).unwrap(), 0.415_107_497_4) < 1e-9);
    assert!(rel(dual_weight(&ProcessKind::Excursion, 1.0).unwrap(), 0.398_942_280_4) < 1e-9);
    let t = TimeGrid::new(vec![0.5]).unwrap();
    let want = 8.0 * 2f64.sqrt() / PI.sqrt() * (-2.0f64).exp();
    assert!(rel(excursion_fdd(&t, &[1.0]).unwrap(), want) < 1e-14);
    // 4 e^{-1} / √(2π).
    let phi = phi_nu_discrete(&[Atom { v: 0.5, weight: 1.0 }], 2.0).unwrap();
    assert!(rel(phi, 4.0 * (-1.0f64).exp() / (2.0 * PI).sqrt()) < 1e-14);
}

#[test]
fn meander_weight_is_inverse_root() {
    let k = ProcessKind::bessel(1.0).unwrap();
    for x in [0.01, 0.5, 3.0, 40.0] {
        assert!(rel(dual_weight(&k, x).unwrap(), 1.0 / (2.0 * PI * x).sqrt()) < 1e-14);
    }
}

#[test]
fn positivity_probability_of_brownian_motion() {
    let r = integrate_semiinfinite_scaled(|y| g_kernel(1.0, 1.0, y), 1.0, &tight()).unwrap();
    let want = erf(1.0 / 2f64.sqrt());
    assert!((r.value - want).abs() < 1e-8, "{} vs {want}", r.value);
}

#[test]
fn first_passage_density_integrates_to_one() {
    // ∫ ℓ_t(1) dt over (0, ∞), split where the density peaks.
    let head = integrate(|t| ell(t, 1.0), 0.0, 1.0, &tight()).unwrap().value;
    let tail = exdual::quad::integrate_tail(|t| ell(t, 1.0), 1.0, 1.0, &tight()).unwrap().value;
    assert!((head + tail - 1.0).abs() < 1e-8);
}

#[test]
fn psi_half_half_is_complementary_error_function() {
    // ψ(1/2, 1/2, x) = √π e^x erfc(√x).
    for x in [0.01, 0.3, 1.0, 4.0, 20.0] {
        let got = tricomi_psi(PsiParams::new(0.5, 0.5, x).unwrap()).unwrap();
        let want = PI.sqrt() * x.exp() * erfc(x.sqrt());
        assert!(rel(got, want) < 1e-10, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn psi_one_one_is_exponential_integral() {
    // ψ(1, 1, x) = e^x E₁(x), with E₁ from its power series.
    let e1 = |x: f64| {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            sum -= term / k as f64;
        }
        -0.577_215_664_901_532_9 - x.ln() + sum
    };
    for x in [0.05, 0.5, 1.0, 3.0] {
        let got = tricomi_psi(PsiParams::new(1.0, 1.0, x).unwrap()).unwrap();
        let want = x.exp() * e1(x);
        assert!(rel(got, want) < 1e-10, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn beta_weight_matches_mixture_quadrature() {
    for (a, b) in [(1.0, 1.0), (2.0, 0.5), (0.4, 2.5), (3.0, 3.0)] {
        let k = ProcessKind::beta(a, b).unwrap();
        for x in [0.05, 1.0, 7.0] {
            let closed = dual_weight(&k, x).unwrap();
            let direct = phi_nu_beta_quadrature(a, b, x, &tight()).unwrap();
            assert!(rel(closed, direct) < 1e-8, "Beta({a}, {b}) at {x}: {closed} vs {direct}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Kummer's transformation `ψ(a, b, x) = x^{1−b} ψ(a − b + 1, 2 − b, x)`.
    #[test]
    fn psi_kummer_transformation(a in 0.2f64..3.0, shift in 0.1f64..2.5, x in 0.05f64..30.0) {
        let b = a + 1.0 - shift;
        let lhs = tricomi_psi(PsiParams::new(a, b, x).unwrap()).unwrap();
        let rhs = x.powf(1.0 - b) * tricomi_psi(PsiParams::new(shift, 2.0 - b, x).unwrap()).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-9, "{lhs} vs {rhs}");
    }
}
