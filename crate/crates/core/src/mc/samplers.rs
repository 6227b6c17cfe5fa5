//! Exact finite-dimensional samplers.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::stream::SeededStream;
use crate::error::{domain, usage, Error, Result};
use crate::kernels::x_root_transition;
use crate::quad::{integrate, QuadSettings};
use crate::types::{MixingLaw, ProcessKind};

/// Below this starting point the `a → 0` limit of the CDF is used.
const A_MIN: f64 = 1e-150;
const ROOT_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 200;

fn check_times(times: &[f64], include_zero: bool, include_one: bool) -> Result<()> {
    if times.is_empty() {
        return usage("at least one sampling time is required");
    }
    let mut prev = f64::NEG_INFINITY;
    for &t in times {
        let lo_ok = if include_zero { t >= 0.0 } else { t > 0.0 };
        let hi_ok = if include_one { t <= 1.0 } else { t < 1.0 };
        if !(lo_ok && hi_ok) {
            return domain(format!("sampling time {t} is outside the admissible range"));
        }
        if !(t > prev) {
            return domain("sampling times must increase strictly");
        }
        prev = t;
    }
    Ok(())
}

/// Standard Brownian bridge at nondecreasing times in `[0, 1]`, stepping
/// through the Gaussian conditionals given the previous value.
pub fn draw_bridge<R: Rng + ?Sized>(rng: &mut R, times: &[f64], out: &mut [f64]) {
    let (mut s, mut x) = (0.0f64, 0.0f64);
    for (k, &t) in times.iter().enumerate() {
        if t >= 1.0 {
            out[k] = 0.0;
            continue;
        }
        let rem = 1.0 - s;
        let mean = x * (1.0 - t) / rem;
        let var = (t - s) * (1.0 - t) / rem;
        let z: f64 = rng.sample(StandardNormal);
        x = mean + var.sqrt() * z;
        s = t;
        out[k] = x;
    }
}

/// Unit excursion at nondecreasing times in `[0, 1]`: the Euclidean norm of
/// three independent Brownian bridges.
pub fn draw_excursion<R: Rng + ?Sized>(rng: &mut R, times: &[f64], out: &mut [f64]) {
    let mut s = 0.0f64;
    let mut x = [0.0f64; 3];
    for (k, &t) in times.iter().enumerate() {
        if t <= 0.0 || t >= 1.0 {
            out[k] = 0.0;
            continue;
        }
        let rem = 1.0 - s;
        let shrink = (1.0 - t) / rem;
        let sd = ((t - s) * shrink).sqrt();
        let mut sq = 0.0;
        for xi in x.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *xi = *xi * shrink + sd * z;
            sq += *xi * *xi;
        }
        s = t;
        out[k] = sq.sqrt();
    }
}

/// Sampler for the randomizing time `V` of a generalized meander.
#[derive(Debug, Clone)]
pub(crate) enum VSampler {
    Beta(Beta<f64>),
    Atoms { index: WeightedIndex<f64>, v: Vec<f64> },
}

impl VSampler {
    pub(crate) fn new(law: &MixingLaw) -> Result<Self> {
        match law {
            MixingLaw::Beta { alpha, beta } => Beta::new(*alpha, *beta)
                .map(VSampler::Beta)
                .map_err(|e| Error::Domain(format!("Beta({alpha}, {beta}): {e}"))),
            MixingLaw::Atoms(atoms) => {
                let index = WeightedIndex::new(atoms.iter().map(|a| a.weight))
                    .map_err(|e| Error::Domain(format!("nu weights: {e}")))?;
                Ok(VSampler::Atoms { index, v: atoms.iter().map(|a| a.v).collect() })
            }
        }
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            VSampler::Beta(b) => loop {
                // An underflow to 0 has probability far below any test resolution.
                let v = b.sample(rng);
                if v > 0.0 {
                    return v;
                }
            },
            VSampler::Atoms { index, v } => v[index.sample(rng)],
        }
    }
}

/// `V^{−1/2} B^ex_{V tₖ}` at nondecreasing times in `[0, 1]`, given `V`.
pub(crate) fn draw_meander_given_v<R: Rng + ?Sized>(rng: &mut R, v: f64, times: &[f64], out: &mut [f64]) {
    let scaled: Vec<f64> = times.iter().map(|t| v * t).collect();
    draw_excursion(rng, &scaled, out);
    let scale = v.sqrt().recip();
    for y in out.iter_mut() {
        *y *= scale;
    }
}

/// Closed forms below this value lose relative accuracy to cancellation. In
/// the polynomial tails near 0 and ∞ they are replaced by quadrature of the
/// density; near a sharp peak the absolute accuracy already pins the quantile.
const CANCEL_CUTOFF: f64 = 1e-3;

fn density_quad() -> QuadSettings {
    QuadSettings { rel_tol: 1e-13, abs_tol: f64::MIN_POSITIVE, ..Default::default() }
}

/// CDF of `√X_Δ` at `w` given `√X_0 = a`.
pub fn x_root_cdf(a: f64, delta: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let closed = if a < A_MIN {
        (2.0 / PI) * ((w / delta).atan() - delta * w / (delta * delta + w * w))
    } else {
        let b = delta * delta + (w + a) * (w + a);
        (((w - a) / delta).atan() + ((w + a) / delta).atan()) / PI + delta / (2.0 * PI * a) * (-4.0 * w * a / b).ln_1p()
    };
    if closed >= CANCEL_CUTOFF || w > 0.5 * a.hypot(delta) {
        return closed;
    }
    integrate(|z| Ok(x_root_transition(delta, a, z)), 0.0, w, &density_quad()).map_or(closed, |r| r.value)
}

/// Survival function `1 − F` of `√X_Δ`.
pub fn x_root_survival(a: f64, delta: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 1.0;
    }
    let closed = if a < A_MIN {
        (2.0 / PI) * (delta.atan2(w) + delta * w / (delta * delta + w * w))
    } else {
        let b = delta * delta + (w + a) * (w + a);
        (delta.atan2(w - a) + delta.atan2(w + a)) / PI - delta / (2.0 * PI * a) * (-4.0 * w * a / b).ln_1p()
    };
    if closed >= CANCEL_CUTOFF || w < 2.0 * a.hypot(delta) {
        return closed;
    }
    // ∫_w^∞ f = ∫_0^{1/w} f(1/z) z⁻² dz, whose integrand is bounded.
    let g = |z: f64| {
        let sz = delta * delta * z * z;
        Ok(4.0 * delta / (PI * (sz + (1.0 - a * z).powi(2)) * (sz + (1.0 + a * z).powi(2))))
    };
    integrate(g, 0.0, 1.0 / w, &density_quad()).map_or(closed, |r| r.value)
}

/// CDF of `X_Δ` at `y` given `X_0 = x`.
pub fn x_step_cdf(x: f64, elapsed: f64, y: f64) -> Result<f64> {
    if !(elapsed > 0.0 && x >= 0.0) {
        return domain("x_step_cdf needs elapsed > 0 and x >= 0");
    }
    Ok(x_root_cdf(x.sqrt(), elapsed, y.max(0.0).sqrt()))
}

/// Root of `F(w) = u` by bracketing then safeguarded Newton.
fn invert_root_cdf(a: f64, delta: f64, u: f64) -> Result<f64> {
    let upper = 1.0 - u;
    // F(w) − u, switching to the survival form once past the median.
    let g = |w: f64| {
        let f = x_root_cdf(a, delta, w);
        if f < 0.5 {
            f - u
        } else {
            upper - x_root_survival(a, delta, w)
        }
    };
    if u <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = a + delta;
    let mut doublings = 0;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return Err(Error::Sampler(format!("could not bracket the X-step quantile u = {u}")));
        }
    }
    let mut w = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON {
        let gw = g(w);
        if gw == 0.0 {
            return Ok(w);
        }
        if gw < 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        let dens = x_root_transition(delta, a, w);
        let newton = w - gw / dens;
        let next = if dens > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let scale = next.abs().max(f64::MIN_POSITIVE);
        if (next - w).abs() <= ROOT_TOL * scale || hi - lo <= ROOT_TOL * scale {
            return Ok(next);
        }
        w = next;
    }
    Err(Error::Sampler(format!("X-step inversion did not converge for a = {a}, delta = {delta}, u = {u}")))
}

/// One step of `X` of length `elapsed` from `x`, by inversion of the CDF in `√y`.
pub fn draw_x_step<R: Rng + ?Sized>(rng: &mut R, x: f64, elapsed: f64) -> Result<f64> {
    let u: f64 = rng.random();
    let w = invert_root_cdf(x.sqrt(), elapsed, u)?;
    Ok(w * w)
}

pub fn sample_brownian_bridge(times: &[f64], stream: SeededStream) -> Result<Vec<f64>> {
    check_times(times, true, true)?;
    let mut out = vec![0.0; times.len()];
    draw_bridge(&mut stream.rng(), times, &mut out);
    Ok(out)
}

pub fn sample_excursion(times: &[f64], stream: SeededStream) -> Result<Vec<f64>> {
    check_times(times, true, true)?;
    let mut out = vec![0.0; times.len()];
    draw_excursion(&mut stream.rng(), times, &mut out);
    Ok(out)
}

/// Generalized meander `B^{(ν)}` at times in `[0, 1]`; time 0 gives 0.
pub fn sample_generalized_meander(kind: &ProcessKind, times: &[f64], stream: SeededStream) -> Result<Vec<f64>> {
    kind.validate()?;
    let Some(law) = kind.mixing_law() else {
        return usage("sample_generalized_meander needs a meander kind; use sample_excursion");
    };
    check_times(times, true, true)?;
    let vs = VSampler::new(&law)?;
    let mut rng = stream.rng();
    let v = vs.draw(&mut rng);
    let mut out = vec![0.0; times.len()];
    draw_meander_given_v(&mut rng, v, times, &mut out);
    Ok(out)
}

pub fn sample_x_step(x: f64, elapsed: f64, stream: SeededStream) -> Result<f64> {
    if !(elapsed > 0.0) {
        return domain(format!("sample_x_step needs elapsed > 0, got {elapsed}"));
    }
    if !(x.is_finite() && x >= 0.0) {
        return domain(format!("sample_x_step needs x >= 0, got {x}"));
    }
    draw_x_step(&mut stream.rng(), x, elapsed)
}

/// What a [`SamplePath`] was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum PathSource {
    Process { kind: ProcessKind },
    X { x0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub source: PathSource,
    pub stream: SeededStream,
}

/// Draw one path. Process times lie in `[0, 1]`; `X` times are positive
/// and measured from the start at `x0`.
pub fn sample_path(source: &PathSource, times: &[f64], stream: SeededStream) -> Result<SamplePath> {
    let values = match source {
        PathSource::Process { kind: ProcessKind::Excursion } => {
            check_times(times, true, true)?;
            let mut out = vec![0.0; times.len()];
            draw_excursion(&mut stream.rng(), times, &mut out);
            out
        }
        PathSource::Process { kind } => sample_generalized_meander(kind, times, stream)?,
        PathSource::X { x0 } => {
            if !(x0.is_finite() && *x0 >= 0.0) {
                return domain("x0 must be finite and non-negative");
            }
            if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
                return domain("X sampling times must be positive and strictly increasing");
            }
            let mut rng = stream.rng();
            let mut x = *x0;
            let mut prev = 0.0;
            let mut out = Vec::with_capacity(times.len());
            for &t in times {
                x = draw_x_step(&mut rng, x, t - prev)?;
                prev = t;
                out.push(x);
            }
            out
        }
    };
    Ok(SamplePath { times: times.to_vec(), values, source: source.clone(), stream })
}
