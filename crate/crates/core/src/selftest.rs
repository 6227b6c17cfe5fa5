//! Property checks across all modules, runnable outside the test harness.
//!
//! Each check returns a [`CheckOutcome`]; the integration tests, the
//! acceptance target and the `selftest` command all run the same code.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{random_instance, reduce_boundary, verify, DualityInstance, HarnessSettings, KindFamily, Methods, Reduced};
use crate::kernels::{dual_weight, ell, excursion_fdd, g_kernel, x_transition};
use crate::mc::gof::{bin_probabilities, chi_square, ks_two_sample};
use crate::mc::{draw_excursion, draw_x_step, mc_lhs, mc_rhs, sample_path, PathSource, SeededStream};
use crate::quad::{integrate_partitioned, integrate_tail, integrate_semiinfinite_scaled, lhs_fixed_v, phi_nu_beta_quadrature, rhs_fixed_v, QuadSettings};
use crate::special::{tricomi_psi, PsiParams};
use crate::types::{ArgGrid, ProcessKind, TimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub module: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(module: &str, name: &str, result: Result<(bool, String)>) -> Self {
        let (pass, detail) = match result {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        Self { module: module.into(), name: name.into(), pass, detail }
    }
}

fn tight() -> QuadSettings {
    QuadSettings { rel_tol: 1e-11, abs_tol: 1e-14, max_subdivisions: 4000, ..Default::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn log_uniform(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Running maximum of a relative error, remembering where it occurred.
struct Worst(f64, String);

impl Worst {
    fn new() -> Self {
        Self(0.0, String::new())
    }
    fn update(&mut self, err: f64, at: impl FnOnce() -> String) {
        if !(err <= self.0) {
            self.0 = err;
            self.1 = at();
        }
    }
    fn verdict(self, tol: f64) -> (bool, String) {
        (self.0 <= tol, format!("max rel err {:.3e} (tol {tol:e}) at {}", self.0, self.1))
    }
}

/// `∫ p_t(x, y) dy = 1` at `points` random `(t, x)`.
pub fn kernel_normalization(stream: SeededStream, points: usize, tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut rng = stream.rng();
        let mut w = Worst::new();
        for _ in 0..points {
            let t = log_uniform(&mut rng, 0.05, 3.0);
            let x = log_uniform(&mut rng, 1e-3, 20.0);
            let scale = 1.0 + x + t * t;
            let r = integrate_semiinfinite_scaled(|y| x_transition(t, x, y), scale, &tight())?;
            w.update((r.value - 1.0).abs(), || format!("t={t}, x={x}"));
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("kernels", "normalization", run())
}

/// `∫ p_s(x, z) p_t(z, y) dz = p_{s+t}(x, y)`.
pub fn chapman_kolmogorov(stream: SeededStream, points: usize, tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut rng = stream.rng();
        let mut w = Worst::new();
        for _ in 0..points {
            let s = log_uniform(&mut rng, 0.1, 2.0);
            let t = log_uniform(&mut rng, 0.1, 2.0);
            let x = log_uniform(&mut rng, 1e-2, 5.0);
            let y = log_uniform(&mut rng, 1e-2, 5.0);
            let f = |z: f64| Ok(x_transition(s, x, z)? * x_transition(t, z, y)?);
            let lo = x.min(y);
            let hi = x.max(y);
            let head = integrate_partitioned(f, &[0.0, lo, hi, 2.0 * hi + 1.0], &tight())?;
            let tail = integrate_tail(f, 2.0 * hi + 1.0, 2.0 * hi + 1.0, &tight())?;
            let want = x_transition(s + t, x, y)?;
            w.update(rel(head.value + tail.value, want), || format!("s={s}, t={t}, x={x}, y={y}"));
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("kernels", "chapman_kolmogorov", run())
}

/// `√x p_s(x, y) = √y p_s(y, x)` and `p_{λs}(x, y) = λ⁻² p_s(x/λ², y/λ²)`.
pub fn balance_and_scaling(stream: SeededStream, points: usize, tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut rng = stream.rng();
        let mut w = Worst::new();
        for _ in 0..points {
            let s = log_uniform(&mut rng, 0.01, 10.0);
            let x = log_uniform(&mut rng, 1e-4, 100.0);
            let y = log_uniform(&mut rng, 1e-4, 100.0);
            let lam = log_uniform(&mut rng, 0.1, 10.0);
            let db = rel(x.sqrt() * x_transition(s, x, y)?, y.sqrt() * x_transition(s, y, x)?);
            w.update(db, || format!("balance s={s}, x={x}, y={y}"));
            let l2 = lam * lam;
            let ss = rel(x_transition(lam * s, x, y)?, x_transition(s, x / l2, y / l2)? / l2);
            w.update(ss, || format!("scaling s={s}, x={x}, y={y}, lambda={lam}"));
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("kernels", "detailed_balance_and_self_similarity", run())
}

/// `∫ x e^{−tx²/2} sin(xy) dx = π ℓ_t(y)` and
/// `∫ e^{−tx²/2} sin(xy₁) sin(xy₂) dx = (π/2) g_t(y₁, y₂)`.
pub fn sine_transforms(stream: SeededStream, points: usize, tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut rng = stream.rng();
        let mut w = Worst::new();
        for _ in 0..points {
            let t: f64 = rng.random_range(0.2..2.0);
            let y1 = rng.random_range(0.2..2.0);
            let y2 = rng.random_range(0.2..2.0);
            // e^{−tx²/2} < 1e−30 beyond the cut.
            let cut = (2.0 * 70.0 / t).sqrt();
            let breaks: Vec<f64> = (0..=64).map(|k| cut * k as f64 / 64.0).collect();
            let q = QuadSettings { abs_tol: 1e-15, ..tight() };
            let a = integrate_partitioned(|x| Ok(x * (-0.5 * t * x * x).exp() * (x * y1).sin()), &breaks, &q)?;
            w.update(rel(a.value, PI * ell(t, y1)?), || format!("ell t={t}, y={y1}"));
            let b = integrate_partitioned(|x| Ok((-0.5 * t * x * x).exp() * (x * y1).sin() * (x * y2).sin()), &breaks, &q)?;
            w.update(rel(b.value, 0.5 * PI * g_kernel(t, y1, y2)?), || format!("g t={t}, y1={y1}, y2={y2}"));
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("kernels", "sine_transforms", run())
}

/// `ψ(β, β + 1, z) = z^{−β}`.
pub fn psi_power_identity(stream: SeededStream, points: usize, tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut rng = stream.rng();
        let mut w = Worst::new();
        for _ in 0..points {
            let b = rng.random_range(0.1..3.0);
            let z = log_uniform(&mut rng, 1e-3, 1e3);
            let got = tricomi_psi(PsiParams::new(b, b + 1.0, z)?)?;
            w.update(rel(got, z.powf(-b)), || format!("beta={b}, z={z}"));
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("special", "psi_power_identity", run())
}

/// Beta weight through `ψ` against direct quadrature over `V`.
pub fn beta_weight_cross_check(stream: SeededStream, points: usize, tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut rng = stream.rng();
        let mut w = Worst::new();
        for _ in 0..points {
            let a = rng.random_range(0.3..3.0);
            let b = rng.random_range(0.3..3.0);
            let x = log_uniform(&mut rng, 1e-2, 50.0);
            let closed = dual_weight(&ProcessKind::beta(a, b)?, x)?;
            let direct = phi_nu_beta_quadrature(a, b, x, &tight())?;
            w.update(rel(closed, direct), || format!("alpha={a}, beta={b}, x={x}"));
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("kernels", "beta_weight_cross_check", run())
}

/// Single-time excursion marginals integrate to 1.
pub fn excursion_marginal_normalization(tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut w = Worst::new();
        for &t in &[0.05, 0.3, 0.5, 0.9] {
            let grid = TimeGrid::new(vec![t])?;
            let r = integrate_semiinfinite_scaled(|y| excursion_fdd(&grid, &[y]), 1.0, &tight())?;
            w.update((r.value - 1.0).abs(), || format!("t={t}"));
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("kernels", "excursion_marginal_normalization", run())
}

fn grids(s: &[f64], t: &[f64]) -> Result<(ArgGrid, TimeGrid)> {
    Ok((ArgGrid::new(s.to_vec())?, TimeGrid::new(t.to_vec())?))
}

/// Quadrature verdicts on fixed instances of every kind.
pub fn quad_fixed_battery(tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let hs = HarnessSettings { quad_threshold: tol, ..Default::default() };
        let kinds = [
            ProcessKind::Excursion,
            ProcessKind::bessel(1.0)?,
            ProcessKind::bessel(2.5)?,
            ProcessKind::beta(2.0, 0.5)?,
            ProcessKind::discrete(vec![(0.3, 0.5), (1.0, 0.5)])?,
        ];
        let mut w = Worst::new();
        for kind in kinds {
            for (s, t) in [(vec![1.0], vec![0.5]), (vec![0.7, 1.3], vec![0.25, 0.75]), (vec![1.0, 2.0], vec![0.0, 0.6])] {
                let inst = DualityInstance::from_vecs(kind.clone(), s, t, "selftest")?;
                let r = verify(&inst, Methods::QUAD, &hs, 0, SeededStream::new(0, 0))?;
                let d = r.quad_discrepancy.unwrap_or(f64::INFINITY);
                w.update(d, || format!("{kind} s={:?} t={:?}", inst.s.as_slice(), inst.t.as_slice()));
            }
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("quad", "fixed_battery", run())
}

/// Conditional identity at fixed `V = v`.
pub fn fixed_v_identity(tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let (s, t) = grids(&[0.7, 1.3], &[0.25, 0.75])?;
        let mut w = Worst::new();
        for v in [0.3, 1.0] {
            let st = QuadSettings::default();
            let l = lhs_fixed_v(&s, &t, v, &st)?.value;
            let r = rhs_fixed_v(&s, &t, v, &st)?.value;
            w.update(rel(l, r), || format!("v={v}"));
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("quad", "fixed_v_identity", run())
}

/// Both sides equal 1 when the only time is pinned.
pub fn boundary_values(tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut w = Worst::new();
        for (kind, t) in [(ProcessKind::Excursion, 0.0), (ProcessKind::Excursion, 1.0), (ProcessKind::bessel(1.0)?, 1.0), (ProcessKind::beta(2.0, 0.5)?, 1.0)] {
            let inst = DualityInstance::from_vecs(kind.clone(), vec![1.3], vec![t], "selftest")?;
            let r = verify(&inst, Methods::QUAD, &HarnessSettings::default(), 0, SeededStream::new(0, 0))?;
            for e in [r.lhs_quad, r.rhs_quad].into_iter().flatten() {
                w.update((e.value - 1.0).abs(), || format!("{kind} t={t}"));
            }
            if !matches!(reduce_boundary(&inst)?, Reduced::Exact { value } if value == 1.0) {
                return Ok((false, format!("{kind} t={t} did not reduce to the exact value 1")));
            }
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("harness", "boundary_values", run())
}

fn p_value_verdict(p: f64, level: f64, detail: String) -> (bool, String) {
    (p > level, format!("p = {p:.4} (level {level}); {detail}"))
}

/// χ² of the excursion marginal at `t` against its density.
pub fn excursion_marginal_gof(stream: SeededStream, n: usize, t: f64, level: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let grid = TimeGrid::new(vec![t])?;
        let edges: Vec<f64> = (1..=60).map(|k| k as f64 * 0.05).collect();
        let probs = bin_probabilities(|y| excursion_fdd(&grid, &[y]), &edges, &tight())?;
        let mut rng = stream.rng();
        let mut out = [0.0];
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                draw_excursion(&mut rng, &[t], &mut out);
                out[0]
            })
            .collect();
        let r = chi_square(&samples, &edges, &probs)?;
        Ok(p_value_verdict(r.p_value, level, format!("chi2 = {:.2} on {} dof, n = {n}", r.statistic, r.dof)))
    };
    CheckOutcome::new("mc", "excursion_marginal_chi2", run())
}

/// χ² of one X step from `x` over `elapsed` against quadrature of `p`.
pub fn x_step_gof(stream: SeededStream, n: usize, x: f64, elapsed: f64, level: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        // Bins uniform in √y out to the bulk, then geometric through the tail.
        let mut edges: Vec<f64> = (1..=50).map(|k| (k as f64 * 0.06).powi(2)).collect();
        let mut e = *edges.last().expect("non-empty");
        for _ in 0..20 {
            e *= 1.5;
            edges.push(e);
        }
        let probs = bin_probabilities(|y| x_transition(elapsed, x, y), &edges, &tight())?;
        let mut rng = stream.rng();
        let samples = (0..n).map(|_| draw_x_step(&mut rng, x, elapsed)).collect::<Result<Vec<f64>>>()?;
        let r = chi_square(&samples, &edges, &probs)?;
        Ok(p_value_verdict(r.p_value, level, format!("chi2 = {:.2} on {} dof, n = {n}", r.statistic, r.dof)))
    };
    CheckOutcome::new("mc", "x_step_chi2", run())
}

/// Two-sample KS between `X_{λs}` from `x` and `λ² X_s` from `x/λ²`.
pub fn x_self_similarity_in_law(stream: SeededStream, n: usize, lambda: f64, level: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let (x, s) = (1.3, 0.4);
        let l2 = lambda * lambda;
        let mut ra = stream.rng();
        let mut rb = stream.with_stream(stream.stream_id ^ 1).rng();
        let a = (0..n).map(|_| draw_x_step(&mut ra, x, lambda * s)).collect::<Result<Vec<f64>>>()?;
        let b = (0..n).map(|_| Ok(l2 * draw_x_step(&mut rb, x / l2, s)?)).collect::<Result<Vec<f64>>>()?;
        let r = ks_two_sample(&a, &b)?;
        Ok(p_value_verdict(r.p_value, level, format!("D = {:.5}, n = {n}", r.statistic)))
    };
    CheckOutcome::new("mc", "x_self_similarity_ks", run())
}

/// `X₀` with density `∝ √x/(1+x)²`, so that `√x dx / q` is `(π/2)(1+x)²`.
fn draw_sqrt_reference<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // With x = tan²θ the density of θ on (0, π/2) is ∝ sin²θ.
    loop {
        let th = 0.5 * PI * rng.random::<f64>();
        if rng.random::<f64>() < th.sin().powi(2) {
            let x = th.tan().powi(2);
            return (x, 0.5 * PI * (1.0 + x).powi(2));
        }
    }
}

/// Weighted two-point law of `(X₀, X_s)` under `√x dx` is exchangeable:
/// `E[h(X₀)k(X_s)] = E[k(X₀)h(X_s)]` for `h, k ∈ {e^{−·}, 1/(1+·)}`.
pub fn detailed_balance_in_law(stream: SeededStream, n: usize, z_max: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let s = 0.6;
        let fs: [(&str, fn(f64) -> f64); 2] = [("exp", |x| (-x).exp()), ("rational", |x| 1.0 / (1.0 + x))];
        let mut rng = stream.rng();
        let pairs = (0..n)
            .map(|_| {
                let (x0, w) = draw_sqrt_reference(&mut rng);
                Ok((x0, draw_x_step(&mut rng, x0, s)?, w))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut worst = (0.0f64, String::new());
        for (hn, h) in fs {
            for (kn, k) in fs {
                if hn == kn {
                    continue;
                }
                // Mean and variance of the difference, which shares the draws.
                let diffs: Vec<f64> = pairs.iter().map(|&(a, b, w)| w * (h(a) * k(b) - k(a) * h(b))).collect();
                let m = diffs.iter().sum::<f64>() / n as f64;
                let v = diffs.iter().map(|d| (d - m) * (d - m)).sum::<f64>() / (n as f64 - 1.0);
                let z = m.abs() / (v / n as f64).sqrt();
                if z > worst.0 {
                    worst = (z, format!("h={hn}, k={kn}"));
                }
            }
        }
        Ok((worst.0 <= z_max, format!("max |z| = {:.3} (limit {z_max}) at {}", worst.0, worst.1)))
    };
    CheckOutcome::new("mc", "detailed_balance_in_law", run())
}

/// Same `(seed, stream, n)` gives bit-identical estimates and paths, and
/// different streams differ.
pub fn reproducibility(stream: SeededStream) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let kind = ProcessKind::bessel(1.0)?;
        let (s, t) = grids(&[0.7, 1.3], &[0.25, 0.75])?;
        let a = mc_rhs(&kind, &s, &t, 5_000, stream)?;
        let b = mc_rhs(&kind, &s, &t, 5_000, stream)?;
        let c = mc_rhs(&kind, &s, &t, 5_000, stream.with_stream(stream.stream_id + 1))?;
        let l1 = mc_lhs(&kind, &s, &t, 5_000, stream)?;
        let l2 = mc_lhs(&kind, &s, &t, 5_000, stream)?;
        let src = PathSource::X { x0: 0.5 };
        let p1 = sample_path(&src, &[0.1, 0.4, 2.0], stream)?;
        let p2 = sample_path(&src, &[0.1, 0.4, 2.0], stream)?;
        let same = a.value.to_bits() == b.value.to_bits()
            && a.std_error.to_bits() == b.std_error.to_bits()
            && l1.value.to_bits() == l2.value.to_bits()
            && p1 == p2;
        let distinct = a.value != c.value;
        Ok((same && distinct, format!("repeat identical: {same}; other stream differs: {distinct}")))
    };
    CheckOutcome::new("mc", "reproducibility", run())
}

/// Sample correlation between the first uniforms of neighbouring streams.
pub fn stream_independence(seed: u64, streams: u64, z_max: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let us: Vec<f64> = (0..streams).map(|id| SeededStream::new(seed, id).rng().random::<f64>() - 0.5).collect();
        let lag: f64 = us.windows(2).map(|w| w[0] * w[1]).sum::<f64>();
        // Under independence each product has variance 1/144.
        let z = lag / ((streams - 1) as f64 / 144.0).sqrt();
        Ok((z.abs() <= z_max, format!("lag-1 correlation z = {z:.3} over {streams} streams")))
    };
    CheckOutcome::new("mc", "stream_independence", run())
}

/// Left and right Monte Carlo estimates of one instance agree.
pub fn mc_duality(stream: SeededStream, n: u64, z_max: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let inst = DualityInstance::from_vecs(ProcessKind::Excursion, vec![0.7, 1.3], vec![0.25, 0.75], "selftest")?;
        let hs = HarnessSettings { z_threshold: z_max, ..Default::default() };
        let r = verify(&inst, Methods::BOTH, &hs, n, stream)?;
        let worst = r.mc_z_scores.iter().map(|z| z.z).fold(0.0, f64::max);
        Ok((r.passed(), format!("max |z| = {worst:.3} over {} comparisons, n = {n}", r.mc_z_scores.len())))
    };
    CheckOutcome::new("mc", "mc_duality", run())
}

/// Random instances satisfy the grid invariants and cover every depth.
pub fn random_instance_coverage(seed: u64, count: u64, d_max: usize) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut seen = vec![0usize; d_max + 1];
        for id in 0..count {
            let inst = random_instance(SeededStream::new(seed, id), d_max, &KindFamily::ALL)?;
            inst.validate()?;
            seen[inst.depth()] += 1;
        }
        let covered = seen[1..].iter().all(|&c| c > 0);
        Ok((covered, format!("depth counts {:?}", &seen[1..])))
    };
    CheckOutcome::new("harness", "random_instance_coverage", run())
}

/// Reduction output is interior or constant.
pub fn reduction_idempotent(seed: u64, count: u64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut reduced = 0;
        for id in 0..count {
            let inst = random_instance(SeededStream::new(seed, id), 3, &KindFamily::ALL)?;
            if !inst.has_boundary() {
                continue;
            }
            reduced += 1;
            if let Reduced::Instance(out) = reduce_boundary(&inst)? {
                if out.has_boundary() {
                    return Ok((false, format!("reduction of {inst:?} left a pinned time")));
                }
                if !matches!(reduce_boundary(&out), Err(Error::Usage(_))) {
                    return Ok((false, "reduced instance accepted a second reduction".into()));
                }
            }
        }
        Ok((true, format!("{reduced} boundary instances reduced to interior or constant")))
    };
    CheckOutcome::new("harness", "reduction_idempotent", run())
}

/// `∫ e^{−t₁x/2} φ(x) dx = t₁^{−δ/2}` for the Bessel weight, which is the
/// constant carried by its Gamma proposal.
pub fn bessel_proposal_normalization(tol: f64) -> CheckOutcome {
    let run = || -> Result<(bool, String)> {
        let mut w = Worst::new();
        for delta in [0.3, 1.0, 1.7, 2.5] {
            for t1 in [0.1, 0.5, 1.0] {
                let kind = ProcessKind::bessel(delta)?;
                // x = u^{2/δ} turns x^{δ/2−1} dx into (2/δ) du.
                let p = 2.0 / delta;
                let f = |u: f64| {
                    if u == 0.0 {
                        return Ok(0.0);
                    }
                    let x = u.powf(p);
                    Ok(dual_weight(&kind, x)? * x.powf(1.0 - 0.5 * delta) * p * (-0.5 * t1 * x).exp())
                };
                let r = integrate_semiinfinite_scaled(f, 1.0, &tight())?;
                w.update(rel(r.value, t1.powf(-0.5 * delta)), || format!("delta={delta}, t1={t1}"));
            }
        }
        Ok(w.verdict(tol))
    };
    CheckOutcome::new("mc", "bessel_proposal_normalization", run())
}

/// Every check, with sample sizes sized for a run of a minute or two.
pub fn run_selftest(seed: u64) -> Vec<CheckOutcome> {
    let st = |id: u64| SeededStream::new(seed, id);
    vec![
        kernel_normalization(st(1), 5, 1e-8),
        chapman_kolmogorov(st(2), 10, 1e-6),
        balance_and_scaling(st(3), 100, 1e-14),
        sine_transforms(st(4), 5, 1e-8),
        psi_power_identity(st(5), 20, 1e-10),
        beta_weight_cross_check(st(6), 10, 1e-8),
        excursion_marginal_normalization(1e-8),
        quad_fixed_battery(1e-6),
        fixed_v_identity(1e-6),
        boundary_values(1e-8),
        excursion_marginal_gof(st(7), 200_000, 0.5, 1e-3),
        x_step_gof(st(8), 200_000, 1.0, 0.5, 1e-3),
        x_self_similarity_in_law(st(9), 100_000, 2.0, 1e-3),
        detailed_balance_in_law(st(10), 200_000, 4.0),
        bessel_proposal_normalization(1e-9),
        reproducibility(st(12)),
        stream_independence(seed, 4096, 4.0),
        mc_duality(st(13), 200_000, 4.0),
        random_instance_coverage(seed, 1000, 4),
        reduction_idempotent(seed, 500),
    ]
}
