//! Monte Carlo estimators of both sides of a duality.
//!
//! Replicates are drawn in fixed blocks, each from its own position of the
//! stream, and the block moments are merged in block order. The result
//! depends only on `(seed, stream_id, n)`, not on the thread count.

use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::samplers::{draw_excursion, draw_meander_given_v, draw_x_step, VSampler};
use super::stream::SeededStream;
use crate::error::{usage, Error, Result};
use crate::kernels::dual_weight;
use crate::quad::cheb::PiecewiseCheb;
use crate::types::{ArgGrid, Estimate, Method, MixingLaw, ProcessKind, TimeGrid};

const BLOCK: u64 = 1 << 14;
/// Fewest replicates for which a standard error is reported.
pub const MIN_REPLICATES: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
    /// Kish effective sample size of the importance weights.
    pub ess: f64,
}

impl McEstimate {
    pub fn to_estimate(&self) -> Estimate {
        Estimate { value: self.value, error: self.std_error, method: Method::MonteCarlo }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    w1: f64,
    w2: f64,
}

impl Moments {
    fn push(&mut self, x: f64, w: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
        self.w1 += w;
        self.w2 += w * w;
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n / n;
        self.m2 += o.m2 + d * d * self.n * o.n / n;
        self.n = n;
        self.w1 += o.w1;
        self.w2 += o.w2;
    }
}

/// Run `n` replicates. `replicate` returns the sample and its importance weight.
fn run<F>(n: u64, stream: SeededStream, dim: usize, replicate: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha20Rng, &mut [f64]) -> Result<(f64, f64)> + Sync,
{
    if n < MIN_REPLICATES {
        return usage(format!("Monte Carlo needs at least {MIN_REPLICATES} replicates, got {n}"));
    }
    let blocks = n.div_ceil(BLOCK);
    let parts: Vec<Result<Moments>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.rng_at(b);
            let count = BLOCK.min(n - b * BLOCK);
            let mut scratch = vec![0.0; dim];
            let mut m = Moments::default();
            for _ in 0..count {
                let (x, w) = replicate(&mut rng, &mut scratch)?;
                m.push(x, w);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for p in parts {
        total.merge(&p?);
    }
    let var = total.m2 / (total.n - 1.0);
    Ok(McEstimate { value: total.mean, std_error: (var / total.n).sqrt(), n, ess: total.w1 * total.w1 / total.w2 })
}

fn check_grids(s: &ArgGrid, t: &TimeGrid) -> Result<()> {
    if s.len() != t.len() {
        return usage(format!("argument grid has {} points but time grid has {}", s.len(), t.len()));
    }
    Ok(())
}

/// Plain Monte Carlo of the left-hand side over exact path draws.
pub fn mc_lhs(kind: &ProcessKind, s: &ArgGrid, t: &TimeGrid, n: u64, stream: SeededStream) -> Result<McEstimate> {
    kind.validate()?;
    check_grids(s, t)?;
    let a = s.increments();
    let d = a.len();
    match kind.mixing_law() {
        None => {
            let times = t.as_slice().to_vec();
            run(n, stream, d, |rng, y| {
                draw_excursion(rng, &times, y);
                Ok(((-a.iter().zip(y.iter()).map(|(a, y)| a * y).sum::<f64>()).exp(), 1.0))
            })
        }
        Some(law) => {
            let vs = VSampler::new(&law)?;
            // Reversed times, listed in increasing order.
            let times: Vec<f64> = t.as_slice().iter().rev().map(|tk| 1.0 - tk).collect();
            let coef: Vec<f64> = a.iter().rev().copied().collect();
            run(n, stream, d, |rng, y| {
                let v = vs.draw(rng);
                draw_meander_given_v(rng, v, &times, y);
                Ok(((-coef.iter().zip(y.iter()).map(|(a, y)| a * y).sum::<f64>()).exp(), 1.0))
            })
        }
    }
}

/// Proposal for `X₀` carrying the initial weight `φ(x) e^{−t₁x/2}`.
enum Initial {
    /// `Gamma(shape, rate t₁/2)` with a constant likelihood ratio.
    Gamma(Gamma<f64>, f64),
    /// `V ~ ν`, then `Gamma(3/2, rate (1/V − 1 + t₁)/2)`.
    Mixture(VSampler, f64),
}

impl Initial {
    fn draw(&self, rng: &mut ChaCha20Rng) -> Result<(f64, f64)> {
        match self {
            Initial::Gamma(g, w) => Ok((g.sample(rng), *w)),
            Initial::Mixture(vs, t1) => {
                // V rounding to exactly 1 at t₁ = 0 leaves no proposal; the
                // redraw has probability far below any test resolution.
                let (v, rate) = loop {
                    let v = vs.draw(rng);
                    let rate = 0.5 * ((1.0 - v) / v + t1);
                    if rate > 0.0 {
                        break (v, rate);
                    }
                };
                let g = Gamma::new(1.5, 1.0 / rate).map_err(|e| Error::Sampler(e.to_string()))?;
                Ok((g.sample(rng), (1.0 - v + v * t1).powf(-1.5)))
            }
        }
    }
}

fn gamma(shape: f64, rate: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Sampler(format!("Gamma({shape}, {rate}): {e}")))
}

/// Importance-sampled right-hand side `∫ φ(x) E_x[exp(−Σ cₖ X_{sₖ})] dx`.
///
/// With `t₁ > 0` the start `X₀` is drawn from a proposal that absorbs
/// `φ(x) e^{−t₁x/2}`. With `t₁ = 0` that factor is not integrable against any
/// proposal with finite variance, and the estimator is routed differently:
/// the excursion by stationarity of `√x dx`, generalized meanders either by
/// the `ν`-mixture proposal (when `ν` has little mass near 1) or by moving the
/// weight one step forward through detailed balance.
pub fn mc_rhs(kind: &ProcessKind, s: &ArgGrid, t: &TimeGrid, n: u64, stream: SeededStream) -> Result<McEstimate> {
    kind.validate()?;
    check_grids(s, t)?;
    let c: Vec<f64> = t.gaps().iter().map(|g| 0.5 * g).collect();
    let steps = s.increments();
    let d = steps.len();
    let t1 = t.first();

    if t1 > 0.0 {
        let init = match kind {
            ProcessKind::Excursion => Initial::Gamma(gamma(1.5, 0.5 * t1)?, t1.powf(-1.5)),
            ProcessKind::BesselMeander { delta } => Initial::Gamma(gamma(0.5 * delta, 0.5 * t1)?, t1.powf(-0.5 * delta)),
            _ => Initial::Mixture(VSampler::new(&kind.mixing_law().expect("meander kind"))?, t1),
        };
        return forward(n, stream, &init, &c, &steps);
    }

    match kind {
        ProcessKind::Excursion => {
            if d == 1 {
                return Err(Error::Unsupported(
                    "t1 = 0 with a single time has no normalizable proposal; the right-hand side is exactly 1".into(),
                ));
            }
            let s0 = s.as_slice()[0];
            let s_red = ArgGrid::new(s.as_slice()[1..].iter().map(|x| x - s0).collect())?;
            let t_red = TimeGrid::new(t.as_slice()[1..].to_vec())?;
            mc_rhs(kind, &s_red, &t_red, n, stream)
        }
        ProcessKind::BesselMeander { delta } if *delta < 2.0 => {
            let init = Initial::Mixture(VSampler::new(&kind.mixing_law().expect("meander kind"))?, 0.0);
            forward(n, stream, &init, &c, &steps)
        }
        ProcessKind::BetaMeander { beta, .. } if *beta > 0.5 => {
            let init = Initial::Mixture(VSampler::new(&MixingLaw::Beta { alpha: kind_alpha(kind), beta: *beta })?, 0.0);
            forward(n, stream, &init, &c, &steps)
        }
        ProcessKind::BetaMeander { alpha, beta } if *alpha <= 0.75 => Err(Error::Unsupported(format!(
            "t1 = 0 for Beta({alpha}, {beta}) needs alpha > 3/4 or beta > 1/2 for a finite-variance estimator"
        ))),
        _ => reverse(kind, n, stream, &c, &steps),
    }
}

fn kind_alpha(kind: &ProcessKind) -> f64 {
    match kind {
        ProcessKind::BetaMeander { alpha, .. } => *alpha,
        _ => unreachable!("only called for Beta kinds"),
    }
}

fn forward(n: u64, stream: SeededStream, init: &Initial, c: &[f64], steps: &[f64]) -> Result<McEstimate> {
    run(n, stream, 0, |rng, _| {
        let (mut x, w) = init.draw(rng)?;
        let mut acc = 0.0;
        for (k, &dt) in steps.iter().enumerate() {
            x = draw_x_step(rng, x, dt)?;
            acc += c[k + 1] * x;
        }
        Ok((w * (-acc).exp(), w))
    })
}

/// `√(2π) φ(x)/√x`, the weight carried by the reverse route.
///
/// For Beta kinds each evaluation is a confluent hypergeometric integral, so
/// `ln h` is tabulated against `ln x` over the range that carries the mass;
/// points outside it fall back to the direct evaluation.
enum ReverseWeight<'a> {
    Direct(&'a ProcessKind),
    Table { kind: &'a ProcessKind, table: PiecewiseCheb },
}

const TABLE_LOG_RANGE: (f64, f64) = (-25.0, 12.0);

impl<'a> ReverseWeight<'a> {
    fn new(kind: &'a ProcessKind) -> Result<Self> {
        if !matches!(kind, ProcessKind::BetaMeander { .. }) {
            return Ok(Self::Direct(kind));
        }
        let table = PiecewiseCheb::build(|l| Self::direct_log(kind, l.exp()), TABLE_LOG_RANGE.0, TABLE_LOG_RANGE.1, 1e-11, 512)?;
        Ok(Self::Table { kind, table })
    }

    fn direct_log(kind: &ProcessKind, x: f64) -> Result<f64> {
        Ok(0.5 * (2.0 * std::f64::consts::PI).ln() + dual_weight(kind, x)?.ln() - 0.5 * x.ln())
    }

    fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Self::Direct(kind) => Ok(Self::direct_log(kind, x)?.exp()),
            Self::Table { kind, table } => {
                let l = x.ln();
                if (TABLE_LOG_RANGE.0..=TABLE_LOG_RANGE.1).contains(&l) {
                    Ok(table.eval(l).exp())
                } else {
                    Ok(Self::direct_log(kind, x)?.exp())
                }
            }
        }
    }
}

/// `t₁ = 0`: by detailed balance `φ(x) p_{s₁}(x, y) = √y p_{s₁}(y, x) φ(x)/√x`,
/// so `X_{s₁}` is drawn from `Gamma(3/2, rate c₁)` and the weight
/// `√(2π) φ(X')/√X'` is evaluated at an independent step `X'` from it.
fn reverse(kind: &ProcessKind, n: u64, stream: SeededStream, c: &[f64], steps: &[f64]) -> Result<McEstimate> {
    let c1 = c[1];
    let g = gamma(1.5, c1)?;
    let scale = (2.0 * c1).powf(-1.5);
    let h = ReverseWeight::new(kind)?;
    run(n, stream, 0, |rng, _| {
        let y = g.sample(rng);
        let back = loop {
            let b = draw_x_step(rng, y, steps[0])?;
            if b > 0.0 {
                break b;
            }
        };
        let w = scale * h.eval(back)?;
        let mut x = y;
        let mut acc = 0.0;
        for (k, &dt) in steps.iter().enumerate().skip(1) {
            x = draw_x_step(rng, x, dt)?;
            acc += c[k + 1] * x;
        }
        Ok((w * (-acc).exp(), w))
    })
}
