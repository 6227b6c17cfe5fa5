//! Backward transfer-operator recursions.
//!
//! Both sides of a duality are expectations of `exp(−Σ cᵢ Yᵢ)` along a
//! Markov chain `Y`. They are evaluated from the last time backwards: each
//! level is a one-dimensional integral of the next level against the step
//! kernel. The interior levels are tabulated as piecewise Chebyshev
//! interpolants, and the outermost level is integrated on the fly.
//!
//! The `X` side works in `w = √y`, where the step kernel is the rational
//! function [`x_root_transition`]. The excursion side works in `y` directly.
//! Every backward function lies in `(0, 1]` and is bounded by the exponential
//! factor of its own level, which fixes where it may be truncated.

use super::cheb::PiecewiseCheb;
use super::{integrate_partitioned, QuadResult, QuadSettings};
use crate::error::{domain, usage, Result};
use crate::kernels::{log_excursion_marginal_len, log_excursion_step_len, x_root_transition};
use crate::types::{ArgGrid, TimeGrid};

/// A backward function below `e^{−TRUNCATION}` is treated as zero.
const TRUNCATION: f64 = 45.0;
/// Excursion values beyond this many marginal standard deviations are never reached.
const SIGMA_REACH: f64 = 14.0;
const MAX_PIECES: usize = 4000;

/// Coefficients `cₖ = (t_{k+1} − t_k)/2`, `k = 0..=d`, and steps
/// `s_k − s_{k−1}`, `k = 1..=d`, of the `X`-side functional.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientChain {
    c: Vec<f64>,
    steps: Vec<f64>,
}

impl CoefficientChain {
    pub fn new(c: Vec<f64>, steps: Vec<f64>) -> Result<Self> {
        if c.len() != steps.len() + 1 {
            return usage(format!("a chain with {} steps needs {} coefficients, got {}", steps.len(), steps.len() + 1, c.len()));
        }
        if c.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return domain("chain coefficients must be finite and non-negative");
        }
        if steps.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return domain("chain steps must be positive");
        }
        let total = 2.0 * c.iter().sum::<f64>();
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("chain coefficients must sum to 1/2, got {}", 0.5 * total));
        }
        let d = steps.len();
        if d >= 1 && c[1..d].contains(&0.0) {
            return domain("only the first and last chain coefficients may vanish");
        }
        Ok(Self { c, steps })
    }

    pub fn from_grids(s: &ArgGrid, t: &TimeGrid) -> Result<Self> {
        if s.len() != t.len() {
            return usage(format!("argument grid has {} points but time grid has {}", s.len(), t.len()));
        }
        Self::new(t.gaps().into_iter().map(|g| 0.5 * g).collect(), s.increments())
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

/// Settings for the integrals nested inside an outer quadrature. The
/// integrands are positive, so a pure relative criterion is used; an
/// absolute floor would destroy the relative accuracy of the far tail.
pub(crate) fn inner_settings(settings: &QuadSettings) -> QuadSettings {
    QuadSettings { rel_tol: 0.1 * settings.rel_tol, abs_tol: f64::MIN_POSITIVE, ..*settings }
}

fn table_tol(settings: &QuadSettings) -> f64 {
    0.01 * settings.rel_tol
}

fn sorted_breaks(mut b: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    b.retain(|x| x.is_finite() && *x > lo && *x < hi);
    b.push(lo);
    b.push(hi);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

enum Backward {
    One,
    Gauss(f64),
    Table(PiecewiseCheb),
}

impl Backward {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Backward::One => 1.0,
            Backward::Gauss(c) => (-c * x * x).exp(),
            Backward::Table(t) => {
                if x > t.upper() {
                    0.0
                } else {
                    t.eval(x)
                }
            }
        }
    }

    fn cutoff(&self) -> Option<f64> {
        match self {
            Backward::One => None,
            Backward::Gauss(c) => Some((TRUNCATION / c).sqrt()),
            Backward::Table(t) => Some(t.upper()),
        }
    }
}

/// `∫ q_step(a, b) next(b) db` in root coordinates.
fn x_apply(step: f64, next: &Backward, a: f64, inner: &QuadSettings) -> Result<f64> {
    let Some(cut) = next.cutoff() else {
        return Ok(1.0);
    };
    let breaks = sorted_breaks([-8.0, -2.0, 0.0, 2.0, 8.0].iter().map(|k| a + k * step).collect(), 0.0, cut);
    Ok(integrate_partitioned(|b| Ok(x_root_transition(step, a, b) * next.eval(b)), &breaks, inner)?.value)
}

/// The `X`-side backward recursion with all interior levels tabulated.
pub(crate) struct XChain {
    c0: f64,
    first_step: Option<f64>,
    first: Backward,
    inner: QuadSettings,
    levels: usize,
}

impl XChain {
    pub(crate) fn new(chain: &CoefficientChain, settings: &QuadSettings) -> Result<Self> {
        settings.validate()?;
        let inner = inner_settings(settings);
        let tol = table_tol(settings);
        let c = chain.c();
        let steps = chain.steps();
        let d = chain.depth();
        let mut next = if c[d] == 0.0 { Backward::One } else { Backward::Gauss(c[d]) };
        for k in (1..d).rev() {
            let ck = c[k];
            let step = steps[k];
            let cut = (TRUNCATION / ck).sqrt();
            let prev = &next;
            let table = PiecewiseCheb::build(
                |w| Ok((-ck * w * w).exp() * x_apply(step, prev, w, &inner)?),
                0.0,
                cut,
                tol,
                MAX_PIECES,
            )?;
            next = Backward::Table(table);
        }
        Ok(Self { c0: c[0], first_step: steps.first().copied(), first: next, inner, levels: d })
    }

    /// `V₀` at `X₀ = w²`, without the `e^{−c₀w²}` factor.
    pub(crate) fn continuation(&self, w: f64) -> Result<f64> {
        match self.first_step {
            None => Ok(1.0),
            Some(step) => x_apply(step, &self.first, w, &self.inner),
        }
    }

    /// `V₀` at `X₀ = w²`.
    pub(crate) fn v0(&self, w: f64) -> Result<f64> {
        Ok((-self.c0 * w * w).exp() * self.continuation(w)?)
    }

    pub(crate) fn c0(&self) -> f64 {
        self.c0
    }

    /// Relative error contributed by the nested integrals and tables.
    pub(crate) fn relative_error(&self) -> f64 {
        self.levels as f64 * (self.inner.rel_tol + 10.0 * self.inner.rel_tol)
    }
}

/// `E_{x₀}[exp(−Σₖ 2cₖ X_{s_k}/2)]`, the expectation inside the right-hand side.
pub fn x_chain_expectation(x0: f64, chain: &CoefficientChain, settings: &QuadSettings) -> Result<f64> {
    if !(x0.is_finite() && x0 >= 0.0) {
        return domain(format!("x_chain_expectation needs x0 >= 0, got {x0}"));
    }
    XChain::new(chain, settings)?.v0(x0.sqrt())
}

enum ExcBackward {
    Exp { a: f64, cut: f64 },
    Table(PiecewiseCheb),
}

impl ExcBackward {
    fn eval(&self, y: f64) -> f64 {
        match self {
            ExcBackward::Exp { a, .. } => (-a * y).exp(),
            ExcBackward::Table(t) => {
                if y > t.upper() {
                    0.0
                } else {
                    t.eval(y)
                }
            }
        }
    }

    fn cutoff(&self) -> f64 {
        match self {
            ExcBackward::Exp { cut, .. } => *cut,
            ExcBackward::Table(t) => t.upper(),
        }
    }
}

/// Expectation of `exp(−Σ aⱼ B_{τⱼ})` for an excursion `B` of length `len`
/// observed at interior times.
pub(crate) struct ExcursionChain {
    len: f64,
    points: Vec<(f64, f64)>,
}

impl ExcursionChain {
    /// `points` are `(τ, a)` pairs with `0 < τ₁ < … < len` and `a > 0`.
    pub(crate) fn new(len: f64, points: Vec<(f64, f64)>) -> Result<Self> {
        if !(len.is_finite() && len > 0.0) {
            return domain("excursion length must be positive");
        }
        let mut prev = 0.0;
        for &(tau, a) in &points {
            if !(tau > prev && tau < len) {
                return domain(format!("excursion times must increase strictly inside (0, {len})"));
            }
            if !(a.is_finite() && a > 0.0) {
                return domain("excursion coefficients must be positive");
            }
            prev = tau;
        }
        Ok(Self { len, points })
    }

    fn sigma(&self, tau: f64) -> f64 {
        (tau * (self.len - tau) / self.len).sqrt()
    }

    fn apply(&self, j: usize, next: &ExcBackward, y: f64, inner: &QuadSettings) -> Result<f64> {
        let len = self.len;
        let tau = self.points[j].0;
        let tau_next = self.points[j + 1].0;
        let dt = tau_next - tau;
        let ratio = (len - tau_next) / (len - tau);
        let mu = y * ratio;
        let sd = (dt * ratio).sqrt();
        let mut b: Vec<f64> = [-8.0, -3.0, 0.0, 3.0, 8.0].iter().map(|k| mu + k * sd).collect();
        b.push(1.4 * sd);
        let breaks = sorted_breaks(b, 0.0, next.cutoff());
        let r = if y == 0.0 {
            integrate_partitioned(|z| Ok((log_excursion_marginal_len(len - tau, dt, z)).exp() * next.eval(z)), &breaks, inner)?
        } else {
            integrate_partitioned(|z| Ok(log_excursion_step_len(len, tau, tau_next, y, z).exp() * next.eval(z)), &breaks, inner)?
        };
        Ok(r.value)
    }

    pub(crate) fn expectation(&self, settings: &QuadSettings) -> Result<QuadResult> {
        settings.validate()?;
        let m = self.points.len();
        if m == 0 {
            return Ok(QuadResult { value: 1.0, error: 0.0 });
        }
        let inner = inner_settings(settings);
        let tol = table_tol(settings);
        let reach = SIGMA_REACH * self.points.iter().map(|p| self.sigma(p.0)).fold(0.0, f64::max);

        let (_, a_last) = self.points[m - 1];
        let mut next = ExcBackward::Exp { a: a_last, cut: (TRUNCATION / a_last).min(reach) };
        for j in (1..m - 1).rev() {
            let a = self.points[j].1;
            let cut = (TRUNCATION / a).min(reach);
            let prev = &next;
            let table =
                PiecewiseCheb::build(|y| Ok((-a * y).exp() * self.apply(j, prev, y, &inner)?), 0.0, cut, tol, MAX_PIECES)?;
            next = ExcBackward::Table(table);
        }

        let (tau1, a1) = self.points[0];
        let sd1 = self.sigma(tau1);
        let cut = (TRUNCATION / a1).min(reach);
        let breaks = sorted_breaks([1.0, 2.0, 4.0, 8.0].iter().map(|k| k * sd1).collect(), 0.0, cut);
        let outer = integrate_partitioned(
            |y| {
                let rest = if m == 1 { 1.0 } else { self.apply(0, &next, y, &inner)? };
                Ok(log_excursion_marginal_len(self.len, tau1, y).exp() * (-a1 * y).exp() * rest)
            },
            &breaks,
            settings,
        )?;
        let levels = (m - 1) as f64;
        let error = outer.error + outer.value * levels * 11.0 * inner.rel_tol;
        Ok(QuadResult { value: outer.value, error })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{excursion_fdd, x_transition};
    use crate::quad::{integrate, integrate_semiinfinite};

    fn s() -> QuadSettings {
        QuadSettings { rel_tol: 1e-10, abs_tol: 1e-14, ..Default::default() }
    }

    #[test]
    fn chain_validation() {
        assert!(CoefficientChain::new(vec![0.5], vec![]).is_ok());
        assert!(CoefficientChain::new(vec![0.25, 0.25], vec![1.0]).is_ok());
        assert!(CoefficientChain::new(vec![0.25, 0.2], vec![1.0]).is_err());
        assert!(CoefficientChain::new(vec![0.25, 0.0, 0.25], vec![1.0, 1.0]).is_err());
        assert!(CoefficientChain::new(vec![0.25, 0.25], vec![0.0]).is_err());
        assert!(CoefficientChain::new(vec![0.5], vec![1.0]).is_err());
    }

    #[test]
    fn depth_zero_is_exponential() {
        let chain = CoefficientChain::new(vec![0.5], vec![]).unwrap();
        let v = x_chain_expectation(3.0, &chain, &s()).unwrap();
        assert!((v - (-1.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn depth_one_matches_direct_integral() {
        for &(c0, step, x0) in &[(0.25, 1.0, 1.0), (0.1, 0.3, 4.0), (0.0, 2.0, 0.0), (0.45, 0.05, 0.2)] {
            let chain = CoefficientChain::new(vec![c0, 0.5 - c0], vec![step]).unwrap();
            let got = x_chain_expectation(x0, &chain, &s()).unwrap();
            let direct = integrate_semiinfinite(|y| Ok(x_transition(step, x0, y)? * (-(0.5 - c0) * y).exp()), &s()).unwrap();
            let want = (-c0 * x0).exp() * direct.value;
            assert!((got - want).abs() < 1e-9 * want, "{c0} {step} {x0}: {got} vs {want}");
        }
    }

    #[test]
    fn depth_two_matches_nested_integral() {
        let (c, steps) = (vec![0.125, 0.25, 0.125], vec![0.7, 0.6]);
        let chain = CoefficientChain::new(c.clone(), steps.clone()).unwrap();
        let x0 = 0.8;
        let got = x_chain_expectation(x0, &chain, &s()).unwrap();
        let loose = QuadSettings { rel_tol: 1e-9, abs_tol: 1e-13, ..Default::default() };
        let outer = integrate_semiinfinite(
            |y| {
                let inner = integrate_semiinfinite(|z| Ok(x_transition(steps[1], y, z)? * (-c[2] * z).exp()), &loose)?;
                Ok(x_transition(steps[0], x0, y)? * (-c[1] * y).exp() * inner.value)
            },
            &loose,
        )
        .unwrap();
        let want = (-c[0] * x0).exp() * outer.value;
        assert!((got - want).abs() < 1e-7 * want, "{got} vs {want}");
    }

    #[test]
    fn increasing_a_coefficient_decreases_the_value() {
        // Bypasses the normalization of the public constructor.
        let base = CoefficientChain { c: vec![0.1, 0.2, 0.2], steps: vec![0.5, 1.0] };
        let a = x_chain_expectation(1.0, &base, &s()).unwrap();
        assert!(a > 0.0 && a <= 1.0);
        for k in 0..3 {
            let mut more = base.clone();
            more.c[k] += 0.05;
            let b = x_chain_expectation(1.0, &more, &s()).unwrap();
            assert!(b < a, "k = {k}");
        }
    }

    #[test]
    fn far_tail_decays_like_inverse_square() {
        let chain = CoefficientChain::new(vec![0.0, 0.5], vec![1.0]).unwrap();
        let xc = XChain::new(&chain, &s()).unwrap();
        let r1 = xc.v0(1e3).unwrap() * 1e12;
        let r2 = xc.v0(1e4).unwrap() * 1e16;
        assert!((r1 / r2 - 1.0).abs() < 1e-4, "{r1} {r2}");
    }

    #[test]
    fn excursion_single_time_matches_fdd() {
        let ec = ExcursionChain::new(1.0, vec![(0.5, 1.0)]).unwrap();
        let got = ec.expectation(&s()).unwrap();
        let grid = TimeGrid::new(vec![0.5]).unwrap();
        let want = integrate_semiinfinite(|y| Ok((-y).exp() * excursion_fdd(&grid, &[y])?), &s()).unwrap().value;
        assert!((got.value - want).abs() < 1e-10 * want);
    }

    #[test]
    fn excursion_two_times_match_fdd() {
        let ec = ExcursionChain::new(1.0, vec![(0.25, 0.7), (0.75, 0.6)]).unwrap();
        let got = ec.expectation(&s()).unwrap().value;
        let grid = TimeGrid::new(vec![0.25, 0.75]).unwrap();
        let loose = QuadSettings { rel_tol: 1e-10, abs_tol: 1e-14, ..Default::default() };
        let want = integrate(
            |y1| {
                let inner = integrate(|y2| Ok((-0.6 * y2).exp() * excursion_fdd(&grid, &[y1, y2])?), 0.0, 8.0, &loose)?;
                Ok((-0.7 * y1).exp() * inner.value)
            },
            0.0,
            8.0,
            &loose,
        )
        .unwrap()
        .value;
        assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
    }

    #[test]
    fn excursion_of_other_length_scales() {
        // An excursion of length T at time u has the law of √T B^ex_{u/T}.
        let t = 2.5;
        let long = ExcursionChain::new(t, vec![(0.5, 0.4), (1.0, 0.9), (2.0, 0.3)]).unwrap();
        let unit = ExcursionChain::new(1.0, vec![(0.2, 0.4 * t.sqrt()), (0.4, 0.9 * t.sqrt()), (0.8, 0.3 * t.sqrt())]).unwrap();
        let a = long.expectation(&s()).unwrap().value;
        let b = unit.expectation(&s()).unwrap().value;
        assert!((a - b).abs() < 1e-9 * b, "{a} vs {b}");
    }
}
