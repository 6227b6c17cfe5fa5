//! Globally adaptive bisection on top of the Gauss–Kronrod panel rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::gk::{gk21, Panel};
use super::{QuadResult, QuadSettings, TailPolicy};
use crate::error::{Error, Result};

struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Integrate `f` over the partition given by `breaks` (sorted, at least two points).
///
/// Every panel is refined out of a single global error queue, so the
/// breakpoints only seed the partition; they do not receive separate budgets.
pub fn integrate_partitioned<F>(mut f: F, breaks: &[f64], settings: &QuadSettings) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(ByError(gk21(&mut f, w[0], w[1])?));
        }
    }
    if heap.is_empty() {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }

    let mut splits = 0usize;
    // Panels too narrow to bisect again; their error is final.
    let mut frozen: Vec<Panel> = Vec::new();
    loop {
        let (value, error) = totals(&heap, &frozen);
        let target = settings.abs_tol.max(settings.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadResult { value, error });
        }
        let Some(ByError(worst)) = heap.pop() else {
            return Err(Error::Convergence { estimate: value, error_bound: error, subdivisions: splits });
        };
        if splits >= settings.max_subdivisions {
            heap.push(ByError(worst));
            let (value, error) = totals(&heap, &frozen);
            return Err(Error::Convergence { estimate: value, error_bound: error, subdivisions: splits });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()) {
            frozen.push(worst);
            continue;
        }
        let left = gk21(&mut f, worst.a, mid)?;
        let right = gk21(&mut f, mid, worst.b)?;
        heap.push(ByError(left));
        heap.push(ByError(right));
        splits += 1;
    }
}

fn totals(heap: &BinaryHeap<ByError>, frozen: &[Panel]) -> (f64, f64) {
    let mut value = 0.0;
    let mut error = 0.0;
    for p in heap.iter().map(|p| &p.0).chain(frozen.iter()) {
        value += p.value;
        error += p.error;
    }
    (value, error)
}

/// Adaptive quadrature on a finite interval.
pub fn integrate<F>(f: F, a: f64, b: f64, settings: &QuadSettings) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_partitioned(f, &[a, b], settings)
}

/// `∫_start^∞ f` by integrating consecutive segments of doubling length.
///
/// The segment sequence stops once two consecutive segments fall below a
/// tenth of the current target; the remaining tail is extrapolated
/// geometrically from the last two segments and charged to the error bound.
pub fn integrate_tail<F>(mut f: F, start: f64, first_len: f64, settings: &QuadSettings) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    const MAX_SEGMENTS: usize = 256;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut a = start;
    let mut len = first_len;
    let mut prev: Option<f64> = None;
    let mut quiet = 0;
    for _ in 0..MAX_SEGMENTS {
        let seg_settings = QuadSettings { abs_tol: 0.25 * settings.abs_tol, ..*settings };
        let seg = integrate(&mut f, a, a + len, &seg_settings)?;
        value += seg.value;
        error += seg.error;
        let target = settings.abs_tol.max(settings.rel_tol * value.abs());
        let mag = seg.value.abs();
        if mag <= 0.1 * target {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 2 {
            let tail = match prev {
                Some(p) if p > 0.0 && mag < 0.9 * p => {
                    let r = mag / p;
                    mag * r / (1.0 - r)
                }
                _ => mag,
            };
            return Ok(QuadResult { value, error: error + tail });
        }
        prev = Some(mag);
        a += len;
        len *= 2.0;
    }
    Err(Error::Convergence { estimate: value, error_bound: error, subdivisions: MAX_SEGMENTS })
}

/// `∫_0^∞ f` with the tail handled per `settings.tail`.
pub fn integrate_semiinfinite<F>(f: F, settings: &QuadSettings) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_semiinfinite_scaled(f, 1.0, settings)
}

/// Like [`integrate_semiinfinite`] with the first doubling segment `[0, scale]`.
pub fn integrate_semiinfinite_scaled<F>(f: F, scale: f64, settings: &QuadSettings) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    match settings.tail {
        TailPolicy::Fixed(x_max) => integrate(f, 0.0, x_max, settings),
        TailPolicy::AdaptiveDoubling => integrate_tail(f, 0.0, scale, settings),
    }
}
