//! Adaptive piecewise Chebyshev interpolation.
//!
//! Used to tabulate the backward functions of a transfer-operator recursion
//! so that the next level can evaluate them cheaply.

use rayon::prelude::*;

use crate::error::{Error, Result};

const ORDER: usize = 16;
const NODES: usize = ORDER + 1;
const MAX_DEPTH: u32 = 40;

/// Chebyshev–Lobatto points on [-1, 1], descending.
fn reference_nodes() -> [f64; NODES] {
    let mut x = [0.0; NODES];
    for (j, xj) in x.iter_mut().enumerate() {
        *xj = (std::f64::consts::PI * j as f64 / ORDER as f64).cos();
    }
    x
}

#[derive(Debug, Clone)]
struct Piece {
    a: f64,
    b: f64,
    values: [f64; NODES],
}

impl Piece {
    fn eval(&self, x: f64, nodes: &[f64; NODES]) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..NODES {
            let diff = t - nodes[j];
            if diff == 0.0 {
                return self.values[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == ORDER {
                w *= 0.5;
            }
            let q = w / diff;
            num += q * self.values[j];
            den += q;
        }
        num / den
    }

    /// Magnitude of the trailing Chebyshev coefficients.
    fn tail(&self) -> f64 {
        let n = ORDER as f64;
        let mut worst: f64 = 0.0;
        for k in (ORDER - 2)..=ORDER {
            let mut c = 0.0;
            for j in 0..NODES {
                let mut term = self.values[j] * (std::f64::consts::PI * (k * j) as f64 / n).cos();
                if j == 0 || j == ORDER {
                    term *= 0.5;
                }
                c += term;
            }
            c *= 2.0 / n;
            if k == ORDER {
                c *= 0.5;
            }
            worst = worst.max(c.abs());
        }
        worst
    }
}

/// Piecewise polynomial interpolant on [a, b].
#[derive(Debug, Clone)]
pub struct PiecewiseCheb {
    pieces: Vec<Piece>,
    breaks: Vec<f64>,
    nodes: [f64; NODES],
}

impl PiecewiseCheb {
    /// Build an interpolant of `f` on [a, b] whose trailing coefficients on
    /// every piece are below `tol` (absolute). Node evaluations run in parallel.
    pub fn build<F>(f: F, a: f64, b: f64, tol: f64, max_pieces: usize) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let nodes = reference_nodes();
        // A few seed pieces keep narrow features from aliasing into a flat first fit.
        const SEED: usize = 4;
        let mut pending: Vec<(f64, f64, u32)> = (0..SEED)
            .map(|i| {
                let lo = a + (b - a) * i as f64 / SEED as f64;
                let hi = if i + 1 == SEED { b } else { a + (b - a) * (i + 1) as f64 / SEED as f64 };
                (lo, hi, 0)
            })
            .collect();
        let mut done: Vec<Piece> = Vec::new();
        while !pending.is_empty() {
            let batch: Vec<_> = std::mem::take(&mut pending);
            let evaluated: Vec<Result<Piece>> = batch
                .par_iter()
                .map(|&(lo, hi, _)| {
                    let mut values = [0.0; NODES];
                    let xs: Vec<f64> = nodes.iter().map(|t| 0.5 * (lo + hi) + 0.5 * (hi - lo) * t).collect();
                    let vals: Vec<Result<f64>> = xs.par_iter().map(|&x| f(x)).collect();
                    for (v, r) in values.iter_mut().zip(vals) {
                        *v = r?;
                    }
                    Ok(Piece { a: lo, b: hi, values })
                })
                .collect();
            for (piece, &(lo, hi, depth)) in evaluated.into_iter().zip(batch.iter()) {
                let piece = piece?;
                let scale = piece.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if piece.tail() <= tol || scale <= tol * 1e-3 || depth >= MAX_DEPTH {
                    if depth >= MAX_DEPTH && piece.tail() > tol {
                        return Err(Error::Convergence {
                            estimate: piece.values[NODES / 2],
                            error_bound: piece.tail(),
                            subdivisions: done.len(),
                        });
                    }
                    done.push(piece);
                } else {
                    let mid = 0.5 * (lo + hi);
                    pending.push((lo, mid, depth + 1));
                    pending.push((mid, hi, depth + 1));
                }
            }
            if done.len() + pending.len() > max_pieces {
                return Err(Error::Convergence {
                    estimate: f64::NAN,
                    error_bound: tol,
                    subdivisions: done.len() + pending.len(),
                });
            }
        }
        done.sort_by(|p, q| p.a.total_cmp(&q.a));
        let breaks = done.iter().map(|p| p.b).collect();
        Ok(Self { pieces: done, breaks, nodes })
    }

    pub fn lower(&self) -> f64 {
        self.pieces[0].a
    }

    pub fn upper(&self) -> f64 {
        *self.breaks.last().expect("non-empty interpolant")
    }

    pub fn pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Evaluate; arguments outside [a, b] are clamped to the nearest piece.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.breaks.partition_point(|&b| b < x).min(self.pieces.len() - 1);
        self.pieces[idx].eval(x, &self.nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_function() {
        let f = |x: f64| Ok((-x * x / 3.0).exp() * (1.0 + x).ln());
        let p = PiecewiseCheb::build(f, 0.0, 12.0, 1e-13, 1000).unwrap();
        for k in 0..=1000 {
            let x = 12.0 * k as f64 / 1000.0;
            let exact = (-x * x / 3.0).exp() * (1.0 + x).ln();
            assert!((p.eval(x) - exact).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn refines_around_narrow_feature() {
        let f = |x: f64| Ok(0.05 / (0.0025 + (x - 3.0).powi(2)));
        let p = PiecewiseCheb::build(f, 0.0, 10.0, 1e-10, 4000).unwrap();
        assert!(p.pieces() > 4);
        for k in 0..=997 {
            let x = 10.0 * k as f64 / 997.0;
            let exact = 0.05 / (0.0025 + (x - 3.0).powi(2));
            assert!((p.eval(x) - exact).abs() < 1e-9);
        }
    }
}
