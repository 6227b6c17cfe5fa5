//! Left- and right-hand sides of the duality identities by quadrature.

use std::f64::consts::PI;

use super::chain::{inner_settings, CoefficientChain, ExcursionChain, XChain};
use super::{integrate, integrate_semiinfinite_scaled, QuadResult, QuadSettings};
use crate::error::{domain, usage, Result};
use crate::kernels::weighted_initial_density;
use crate::special::log_gamma;
use crate::types::{Atom, ArgGrid, Estimate, Method, MixingLaw, ProcessKind, TimeGrid};

fn check_grids(s: &ArgGrid, t: &TimeGrid) -> Result<()> {
    if s.len() != t.len() {
        return usage(format!("argument grid has {} points but time grid has {}", s.len(), t.len()));
    }
    Ok(())
}

fn quad_estimate(r: QuadResult) -> Estimate {
    Estimate { value: r.value, error: r.error, method: Method::Quadrature }
}

/// Unit-excursion expectation `E[exp(−Σ aₖ B^ex_{tₖ})]`. Times at 0 or 1
/// see the pinned value 0 and drop out.
fn excursion_lhs(s: &ArgGrid, t: &TimeGrid, settings: &QuadSettings) -> Result<QuadResult> {
    let points: Vec<(f64, f64)> = t
        .as_slice()
        .iter()
        .zip(s.increments())
        .filter(|(&tk, _)| tk > 0.0 && tk < 1.0)
        .map(|(&tk, a)| (tk, a))
        .collect();
    ExcursionChain::new(1.0, points)?.expectation(settings)
}

/// `E[exp(−Σ aₖ v^{−1/2} B^ex_{v(1−tₖ)})]`: by Brownian scaling, an excursion
/// of length `1/v` observed at the reversed times `1 − tₖ`.
fn fixed_v_lhs(s: &ArgGrid, t: &TimeGrid, v: f64, settings: &QuadSettings) -> Result<QuadResult> {
    let len = 1.0 / v;
    let mut points: Vec<(f64, f64)> = t
        .as_slice()
        .iter()
        .zip(s.increments())
        .map(|(&tk, a)| (1.0 - tk, a))
        .filter(|&(u, _)| u > 0.0 && u < len)
        .collect();
    points.reverse();
    ExcursionChain::new(len, points)?.expectation(settings)
}

/// Left-hand side of the generalized-meander identity conditional on `V = v`.
pub fn lhs_fixed_v(s: &ArgGrid, t: &TimeGrid, v: f64, settings: &QuadSettings) -> Result<Estimate> {
    check_grids(s, t)?;
    if !(v > 0.0 && v <= 1.0) {
        return domain(format!("v must lie in (0,1], got {v}"));
    }
    Ok(quad_estimate(fixed_v_lhs(s, t, v, settings)?))
}

/// Right-hand side conditional on `V = v`: the atomic weight of a point mass at `v`.
pub fn rhs_fixed_v(s: &ArgGrid, t: &TimeGrid, v: f64, settings: &QuadSettings) -> Result<Estimate> {
    if !(v > 0.0 && v <= 1.0) {
        return domain(format!("v must lie in (0,1], got {v}"));
    }
    rhs_dual(&ProcessKind::DiscreteNu { atoms: vec![Atom { v, weight: 1.0 }] }, s, t, settings)
}

/// `∫₀¹ f(v) Beta(α, β)(dv)`, with power substitutions at whichever
/// endpoint carries a singular density.
fn beta_mixture<F>(alpha: f64, beta: f64, mut f: F, settings: &QuadSettings) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let log_b = log_gamma(alpha)? + log_gamma(beta)? - log_gamma(alpha + beta)?;
    let left = if alpha < 1.0 {
        // v = r^{1/α}: v^{α−1} dv = dr/α.
        let inv = 1.0 / alpha;
        integrate(
            |r: f64| {
                let v = r.powf(inv);
                Ok(((beta - 1.0) * (-v).ln_1p() - log_b).exp() * inv * f(v)?)
            },
            0.0,
            0.5f64.powf(alpha),
            settings,
        )?
    } else {
        integrate(
            |v: f64| Ok(((alpha - 1.0) * v.ln() + (beta - 1.0) * (-v).ln_1p() - log_b).exp() * f(v)?),
            0.0,
            0.5,
            settings,
        )?
    };
    let right = if beta < 1.0 {
        // 1 − v = r^{1/β}: (1−v)^{β−1} dv = −dr/β.
        let inv = 1.0 / beta;
        integrate(
            |r: f64| {
                let u = r.powf(inv);
                Ok(((alpha - 1.0) * (-u).ln_1p() - log_b).exp() * inv * f(1.0 - u)?)
            },
            0.0,
            0.5f64.powf(beta),
            settings,
        )?
    } else {
        integrate(
            |u: f64| Ok(((alpha - 1.0) * (-u).ln_1p() + (beta - 1.0) * u.ln() - log_b).exp() * f(1.0 - u)?),
            0.0,
            0.5,
            settings,
        )?
    };
    Ok(QuadResult { value: left.value + right.value, error: left.error + right.error })
}

/// Left-hand side: the Laplace transform of the process at times `t`.
///
/// For the excursion this is `E[exp(−Σ (sₖ − sₖ₋₁) B^ex_{tₖ})]`; for a
/// generalized meander it is the same functional of `B^{(ν)}` at the times
/// `1 − tₖ`, computed by conditioning on `V`.
pub fn lhs_laplace(kind: &ProcessKind, s: &ArgGrid, t: &TimeGrid, settings: &QuadSettings) -> Result<Estimate> {
    kind.validate()?;
    check_grids(s, t)?;
    settings.validate()?;
    let r = match kind.mixing_law() {
        None => excursion_lhs(s, t, settings)?,
        Some(MixingLaw::Atoms(atoms)) => {
            let mut acc = QuadResult { value: 0.0, error: 0.0 };
            for a in &atoms {
                let r = fixed_v_lhs(s, t, a.v, settings)?;
                acc.value += a.weight * r.value;
                acc.error += a.weight * r.error;
            }
            acc
        }
        Some(MixingLaw::Beta { alpha, beta }) => {
            let inner = inner_settings(settings);
            let mut inner_error = 0.0f64;
            let mut r = beta_mixture(
                alpha,
                beta,
                |v| {
                    let r = fixed_v_lhs(s, t, v, &inner)?;
                    inner_error = inner_error.max(r.error / r.value.max(f64::MIN_POSITIVE));
                    Ok(r.value)
                },
                settings,
            )?;
            r.error += inner_error * r.value;
            r
        }
    };
    Ok(quad_estimate(r))
}

/// Right-hand side: `∫₀^∞ φ(x) E_x[exp(−½ Σₖ (t_{k+1} − tₖ) X_{sₖ})] dx`.
///
/// The outer integral runs in `u` with `x = w²`, `w = u^m`, where `m` is
/// chosen so that the power-law behaviour of `φ(x) dx` at the origin becomes
/// a constant density in `u`.
pub fn rhs_dual(kind: &ProcessKind, s: &ArgGrid, t: &TimeGrid, settings: &QuadSettings) -> Result<Estimate> {
    kind.validate()?;
    check_grids(s, t)?;
    let chain = CoefficientChain::from_grids(s, t)?;
    let xc = XChain::new(&chain, settings)?;
    let c0 = xc.c0();
    // φ(x) ~ x^p at the origin, so φ(w²)·2w ~ w^{2p+1}.
    let p = match kind {
        ProcessKind::Excursion | ProcessKind::DiscreteNu { .. } => 0.5,
        ProcessKind::BesselMeander { delta } => 0.5 * delta - 1.0,
        ProcessKind::BetaMeander { alpha, .. } => (alpha - 1.0).min(0.5),
    };
    let m = if p < 0.0 { 1.0 / (2.0 * p + 2.0) } else { 1.0 };
    let r = integrate_semiinfinite_scaled(
        |u: f64| {
            if u == 0.0 {
                return Ok(0.0);
            }
            let w = u.powf(m);
            let jac = 2.0 * w * m * w / u;
            let weight = weighted_initial_density(kind, w * w, c0)?;
            if weight == 0.0 {
                return Ok(0.0);
            }
            Ok(weight * jac * xc.continuation(w)?)
        },
        1.0,
        settings,
    )?;
    let error = r.error + r.value.abs() * xc.relative_error();
    Ok(Estimate { value: r.value, error, method: Method::Quadrature })
}

/// `φ_ν(x)` for `ν = Beta(α, β)` by direct quadrature of its defining
/// integral over `v`; an independent check on the closed form through `ψ`.
pub fn phi_nu_beta_quadrature(alpha: f64, beta: f64, x: f64, settings: &QuadSettings) -> Result<f64> {
    ProcessKind::beta(alpha, beta)?;
    if !(x > 0.0) {
        return domain("phi_nu needs x > 0");
    }
    let base = 0.5 * x.ln() - 0.5 * (2.0 * PI).ln();
    let r = beta_mixture(
        alpha,
        beta,
        |v| Ok((base + 0.5 * x - 0.5 * x / v - 1.5 * v.ln()).exp()),
        &QuadSettings { abs_tol: f64::MIN_POSITIVE, ..*settings },
    )?;
    Ok(r.value)
}
