//! Goodness-of-fit statistics for the sampler tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{usage, Error, Result};
use crate::quad::{integrate, integrate_tail, QuadSettings};

/// Bins whose expected count falls below this are merged into a neighbour.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Probabilities of the bins `[0, e₀), [e₀, e₁), …, [e_last, ∞)` under the
/// density `f` on `[0, ∞)`.
pub fn bin_probabilities<F>(f: F, edges: &[f64], settings: &QuadSettings) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    if edges.is_empty() || edges[0] <= 0.0 || edges.windows(2).any(|w| w[1] <= w[0]) {
        return usage("bin edges must be positive and strictly increasing");
    }
    let mut probs = Vec::with_capacity(edges.len() + 1);
    let mut lo = 0.0;
    for &e in edges {
        probs.push(integrate(&f, lo, e, settings)?.value);
        lo = e;
    }
    probs.push(integrate_tail(&f, lo, lo.max(1.0), settings)?.value);
    Ok(probs)
}

/// Pearson χ² of `samples` against bin probabilities `probs` over `edges`
/// (as in [`bin_probabilities`]). Sparse bins are merged left to right.
pub fn chi_square(samples: &[f64], edges: &[f64], probs: &[f64]) -> Result<GofResult> {
    if probs.len() != edges.len() + 1 {
        return usage("chi_square needs one more probability than edges");
    }
    let n = samples.len() as f64;
    let mut counts = vec![0u64; probs.len()];
    for &x in samples {
        counts[edges.partition_point(|&e| e <= x)] += 1;
    }
    let total: f64 = probs.iter().sum();
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (c, p) in counts.iter().zip(probs) {
        acc.0 += *c as f64;
        acc.1 += p / total * n;
        if acc.1 >= MIN_EXPECTED {
            merged.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => merged.push(acc),
        }
    }
    if merged.len() < 2 {
        return usage("too few populated bins for a chi-square test");
    }
    let statistic: f64 = merged.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = merged.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(GofResult { statistic, dof, p_value: dist.sf(statistic) })
}

/// Two-sample Kolmogorov–Smirnov statistic with its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<GofResult> {
    if a.is_empty() || b.is_empty() {
        return usage("ks_two_sample needs two non-empty samples");
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    Ok(GofResult { statistic: d, dof: 0, p_value: kolmogorov_sf(lambda) })
}

/// `P(K > λ)` for the Kolmogorov distribution.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::mc::SeededStream;

    #[test]
    fn uniform_passes_and_shifted_fails() {
        let mut rng = SeededStream::new(9, 0).rng();
        let xs: Vec<f64> = (0..50_000).map(|_| rng.random::<f64>()).collect();
        let edges: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
        let mut probs = vec![0.05; 20];
        probs.push(0.0);
        let mut edges1 = edges.clone();
        edges1.push(1.0);
        let r = chi_square(&xs, &edges1, &probs).unwrap();
        assert!(r.p_value > 1e-3, "{r:?}");
        let shifted: Vec<f64> = xs.iter().map(|x| (x * 1.03).min(0.999_999)).collect();
        assert!(chi_square(&shifted, &edges1, &probs).unwrap().p_value < 1e-3);
    }

    #[test]
    fn exponential_bins_from_density() {
        let edges = [0.5, 1.0, 2.0];
        let p = bin_probabilities(|x| Ok((-x).exp()), &edges, &QuadSettings::default()).unwrap();
        let want = [1.0 - (-0.5f64).exp(), (-0.5f64).exp() - (-1.0f64).exp(), (-1.0f64).exp() - (-2.0f64).exp(), (-2.0f64).exp()];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn ks_same_and_different() {
        let mut rng = SeededStream::new(4, 0).rng();
        let a: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_two_sample(&a, &b).unwrap().p_value > 1e-3);
        let c: Vec<f64> = b.iter().map(|x| x * x).collect();
        assert!(ks_two_sample(&a, &c).unwrap().p_value < 1e-6);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Tabulated: P(K > 1.36) ≈ 0.049, P(K > 1.95) ≈ 0.001.
        assert!((kolmogorov_sf(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_sf(1.95) - 0.00103).abs() < 1e-4);
    }
}
