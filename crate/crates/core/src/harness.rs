//! Instances, verification reports and randomized batteries.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::mc::{mc_lhs, mc_rhs, McEstimate, SeededStream};
use crate::quad::{lhs_laplace, rhs_dual, QuadSettings};
use crate::types::{ArgGrid, Atom, Estimate, Method, ProcessKind, TimeGrid};

/// Bit that separates the right-hand-side stream from the left-hand side.
const RHS_STREAM_BIT: u64 = 1 << 63;

/// One concrete statement of a duality identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityInstance {
    pub kind: ProcessKind,
    pub s: ArgGrid,
    pub t: TimeGrid,
    #[serde(default)]
    pub label: String,
}

impl DualityInstance {
    pub fn new(kind: ProcessKind, s: ArgGrid, t: TimeGrid, label: impl Into<String>) -> Result<Self> {
        let inst = Self { kind, s, t, label: label.into() };
        inst.validate()?;
        Ok(inst)
    }

    /// Build from raw vectors.
    pub fn from_vecs(kind: ProcessKind, s: Vec<f64>, t: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::new(kind, ArgGrid::new(s)?, TimeGrid::new(t)?, label)
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        if self.s.len() != self.t.len() {
            return usage(format!("argument grid has {} points but time grid has {}", self.s.len(), self.t.len()));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.s.len()
    }

    /// Whether some time pins the left-hand process at 0: `t_d = 1` for every
    /// kind (generalized meanders are read at `1 − t` and start at 0), and
    /// also `t₁ = 0` for the excursion.
    pub fn has_boundary(&self) -> bool {
        self.t.last() == 1.0 || (self.kind.is_excursion() && self.t.first() == 0.0)
    }

    /// The excursion instance observed in reversed time, `t ↦ 1 − t`, with
    /// the Laplace increments reversed accordingly. Both sides are unchanged
    /// because the excursion is reversible.
    pub fn time_reversed(&self) -> Result<Self> {
        if !self.kind.is_excursion() {
            return usage("time reversal preserves the law only for the excursion");
        }
        let t: Vec<f64> = self.t.as_slice().iter().rev().map(|x| 1.0 - x).collect();
        let mut acc = 0.0;
        let s: Vec<f64> = self
            .s
            .increments()
            .iter()
            .rev()
            .map(|a| {
                acc += a;
                acc
            })
            .collect();
        Self::from_vecs(self.kind.clone(), s, t, format!("{} reversed", self.label))
    }
}

/// Outcome of [`reduce_boundary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Reduced {
    Instance(DualityInstance),
    Exact { value: f64 },
}

/// Remove the pinned times of an instance.
///
/// A final time `t_d = 1` contributes nothing on the left, and on the right
/// its coefficient `(1 − t_d)/2` vanishes, so the last point is dropped. For
/// the excursion `B₀ = 0` as well, and `√x dx` is stationary for `X`, so a
/// first time `t₁ = 0` is dropped and the remaining arguments shifted by
/// `s₁`. An emptied grid has the value 1.
pub fn reduce_boundary(instance: &DualityInstance) -> Result<Reduced> {
    instance.validate()?;
    if !instance.has_boundary() {
        return usage("reduce_boundary needs an instance with a pinned time (t_d = 1, or t1 = 0 for the excursion)");
    }
    let mut s = instance.s.as_slice().to_vec();
    let mut t = instance.t.as_slice().to_vec();
    if t.last() == Some(&1.0) {
        s.pop();
        t.pop();
    }
    if instance.kind.is_excursion() && t.first() == Some(&0.0) {
        let s1 = s[0];
        s = s[1..].iter().map(|x| x - s1).collect();
        t.remove(0);
    }
    if t.is_empty() {
        return Ok(Reduced::Exact { value: 1.0 });
    }
    Ok(Reduced::Instance(DualityInstance::from_vecs(
        instance.kind.clone(),
        s,
        t,
        format!("{} reduced", instance.label),
    )?))
}

/// Which evaluators to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Methods {
    pub quad: bool,
    pub mc: bool,
}

impl Methods {
    pub const QUAD: Self = Self { quad: true, mc: false };
    pub const MC: Self = Self { quad: false, mc: true };
    pub const BOTH: Self = Self { quad: true, mc: true };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnessSettings {
    pub quad: QuadSettings,
    /// Largest admissible relative gap between the two quadrature values.
    pub quad_threshold: f64,
    /// Largest admissible `|z|` in any comparison involving Monte Carlo.
    pub z_threshold: f64,
}

impl Default for HarnessSettings {
    fn default() -> Self {
        Self { quad: QuadSettings::default(), quad_threshold: 1e-6, z_threshold: 4.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScore {
    /// `"<left>~<right>"`, e.g. `"lhs_mc~rhs_quad"`.
    pub pair: String,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instance: DualityInstance,
    pub lhs_quad: Option<Estimate>,
    pub rhs_quad: Option<Estimate>,
    /// A closed-form short-circuit is reported with `n = 0`.
    pub lhs_mc: Option<McEstimate>,
    pub rhs_mc: Option<McEstimate>,
    pub quad_discrepancy: Option<f64>,
    pub mc_z_scores: Vec<ZScore>,
    pub verdict: Verdict,
    pub stream: Option<SeededStream>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict.pass
    }
}

fn side_error(side: &str, e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("{side}: {m}")),
        Error::Usage(m) => Error::Usage(format!("{side}: {m}")),
        Error::Sampler(m) => Error::Sampler(format!("{side}: {m}")),
        Error::Unsupported(m) => Error::Unsupported(format!("{side}: {m}")),
        other => other,
    }
}

fn exact_mc(value: f64) -> McEstimate {
    McEstimate { value, std_error: 0.0, n: 0, ess: 0.0 }
}

/// `|a − b| / √(σ_a² + σ_b²)`, with two error-free values compared exactly.
fn z_score(a: (f64, f64), b: (f64, f64)) -> f64 {
    let sd = a.1.hypot(b.1);
    let d = (a.0 - b.0).abs();
    if sd > 0.0 {
        d / sd
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// The relative quadrature discrepancy `|L − R| / max(|L|, |R|)`.
pub fn relative_discrepancy(l: f64, r: f64) -> f64 {
    let scale = l.abs().max(r.abs());
    if scale == 0.0 {
        0.0
    } else {
        (l - r).abs() / scale
    }
}

/// Evaluate both sides of `instance` by the requested methods and compare.
///
/// Monte Carlo draws the left side from `stream` and the right side from a
/// disjoint stream derived from it.
pub fn verify(
    instance: &DualityInstance,
    methods: Methods,
    settings: &HarnessSettings,
    n: u64,
    stream: SeededStream,
) -> Result<VerificationReport> {
    instance.validate()?;
    if !(methods.quad || methods.mc) {
        return usage("at least one method must be selected");
    }
    let (kind, s, t) = (&instance.kind, &instance.s, &instance.t);

    let (lhs_quad, rhs_quad) = if methods.quad {
        let l = lhs_laplace(kind, s, t, &settings.quad).map_err(|e| side_error("lhs_quad", e))?;
        let r = rhs_dual(kind, s, t, &settings.quad).map_err(|e| side_error("rhs_quad", e))?;
        (Some(l), Some(r))
    } else {
        (None, None)
    };

    let (lhs_mc, rhs_mc) = if methods.mc {
        let l = mc_lhs(kind, s, t, n, stream).map_err(|e| side_error("lhs_mc", e))?;
        let rhs_stream = stream.with_stream(stream.stream_id ^ RHS_STREAM_BIT);
        let r = match mc_rhs(kind, s, t, n, rhs_stream) {
            Ok(r) => r,
            Err(Error::Unsupported(m)) if instance.has_boundary() => match reduce_boundary(instance)? {
                Reduced::Exact { value } => exact_mc(value),
                Reduced::Instance(_) => return Err(side_error("rhs_mc", Error::Unsupported(m))),
            },
            Err(e) => return Err(side_error("rhs_mc", e)),
        };
        (Some(l), Some(r))
    } else {
        (None, None)
    };

    let mut reasons = Vec::new();
    let quad_discrepancy = match (&lhs_quad, &rhs_quad) {
        (Some(l), Some(r)) => {
            let d = relative_discrepancy(l.value, r.value);
            if !(d <= settings.quad_threshold) {
                reasons.push(format!("quadrature discrepancy {d:e} exceeds {:e}", settings.quad_threshold));
            }
            Some(d)
        }
        _ => None,
    };

    let mut mc_z_scores = Vec::new();
    let named: Vec<(&str, (f64, f64), bool)> = [
        lhs_quad.map(|e| ("lhs_quad", (e.value, e.error), false)),
        rhs_quad.map(|e| ("rhs_quad", (e.value, e.error), false)),
        lhs_mc.map(|e| ("lhs_mc", (e.value, e.std_error), true)),
        rhs_mc.map(|e| ("rhs_mc", (e.value, e.std_error), true)),
    ]
    .into_iter()
    .flatten()
    .collect();
    for (i, a) in named.iter().enumerate() {
        for b in &named[i + 1..] {
            if a.2 || b.2 {
                let z = z_score(a.1, b.1);
                if !(z <= settings.z_threshold) {
                    reasons.push(format!("{}~{} differ by {z:.3} standard errors", a.0, b.0));
                }
                mc_z_scores.push(ZScore { pair: format!("{}~{}", a.0, b.0), z });
            }
        }
    }

    Ok(VerificationReport {
        instance: instance.clone(),
        lhs_quad,
        rhs_quad,
        lhs_mc,
        rhs_mc,
        quad_discrepancy,
        mc_z_scores,
        verdict: Verdict { pass: reasons.is_empty(), reasons },
        stream: methods.mc.then_some(stream),
    })
}

/// Families from which [`random_instance`] draws kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindFamily {
    Excursion,
    Bessel,
    Beta,
    DiscreteNu,
}

impl KindFamily {
    pub const ALL: [KindFamily; 4] = [Self::Excursion, Self::Bessel, Self::Beta, Self::DiscreteNu];

    fn draw(self, rng: &mut ChaCha20Rng) -> ProcessKind {
        match self {
            Self::Excursion => ProcessKind::Excursion,
            Self::Bessel => ProcessKind::BesselMeander { delta: rng.random_range(0.2..2.8) },
            // Ranges keep the t₁ = 0 Monte Carlo route of finite variance.
            Self::Beta => ProcessKind::BetaMeander { alpha: rng.random_range(0.8..=3.0), beta: rng.random_range(0.6..=3.0) },
            Self::DiscreteNu => {
                let m = rng.random_range(1..=3);
                let ln_min = 0.05f64.ln();
                let mut atoms: Vec<Atom> = (0..m)
                    .map(|_| Atom { v: (ln_min * rng.random::<f64>()).exp(), weight: rng.random_range(0.1..1.0) })
                    .collect();
                let total: f64 = atoms.iter().map(|a| a.weight).sum();
                atoms.iter_mut().for_each(|a| a.weight /= total);
                ProcessKind::DiscreteNu { atoms }
            }
        }
    }
}

/// Smallest separation between consecutive times, counting the ends 0 and 1.
pub const MIN_TIME_GAP: f64 = 0.02;
/// Probability of forcing `t₁ = 0`, and separately `t_d = 1`.
pub const BOUNDARY_PROB: f64 = 0.15;

/// A reproducible random instance with `1 ≤ d ≤ d_max`.
pub fn random_instance(stream: SeededStream, d_max: usize, kinds: &[KindFamily]) -> Result<DualityInstance> {
    if d_max == 0 {
        return usage("d_max must be at least 1");
    }
    if kinds.is_empty() {
        return usage("at least one kind family is required");
    }
    if (d_max + 1) as f64 * MIN_TIME_GAP >= 1.0 {
        return usage(format!("d_max = {d_max} leaves no room for the minimum time gap"));
    }
    let mut rng = stream.rng();
    let family = kinds[rng.random_range(0..kinds.len())];
    let kind = family.draw(&mut rng);
    let d = rng.random_range(1..=d_max);

    let (ln_lo, ln_hi) = (0.05f64.ln(), 3.0f64.ln());
    let mut acc = 0.0;
    let s: Vec<f64> = (0..d)
        .map(|_| {
            acc += rng.random_range(ln_lo..ln_hi).exp();
            acc
        })
        .collect();

    // Sorted uniforms on the slack, then spread by the minimum gap.
    let slack = 1.0 - (d + 1) as f64 * MIN_TIME_GAP;
    let mut u: Vec<f64> = (0..d).map(|_| slack * rng.random::<f64>()).collect();
    u.sort_by(f64::total_cmp);
    let mut t: Vec<f64> = u.iter().enumerate().map(|(k, x)| x + (k + 1) as f64 * MIN_TIME_GAP).collect();
    let force_zero = rng.random_bool(BOUNDARY_PROB);
    let force_one = rng.random_bool(BOUNDARY_PROB);
    if force_zero {
        t[0] = 0.0;
    }
    if force_one && !(force_zero && d == 1) {
        t[d - 1] = 1.0;
    }
    DualityInstance::from_vecs(kind, s, t, format!("random:{}:{}", stream.seed, stream.stream_id))
}

/// Stream for instance `index` of a battery rooted at `base`.
pub fn battery_stream(base: SeededStream, index: usize) -> SeededStream {
    base.with_stream(base.stream_id.wrapping_add(index as u64))
}

/// Verify every instance; instance `i` uses [`battery_stream`]`(base, i)`,
/// so results do not depend on scheduling.
pub fn battery(
    instances: &[DualityInstance],
    methods: Methods,
    settings: &HarnessSettings,
    n: u64,
    base: SeededStream,
) -> Vec<Result<VerificationReport>> {
    instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| verify(inst, methods, settings, n, battery_stream(base, i)))
        .collect()
}

/// Estimate of a side, as reported, without the Monte Carlo diagnostics.
pub fn mc_as_estimate(e: &McEstimate) -> Estimate {
    if e.n == 0 {
        Estimate::exact(e.value)
    } else {
        Estimate { value: e.value, error: e.std_error, method: Method::MonteCarlo }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(kind: ProcessKind, s: &[f64], t: &[f64]) -> DualityInstance {
        DualityInstance::from_vecs(kind, s.to_vec(), t.to_vec(), "test").unwrap()
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_boundary(&inst(ProcessKind::Excursion, &[1.0], &[0.0])).unwrap();
        assert_eq!(r, Reduced::Exact { value: 1.0 });
        let r = reduce_boundary(&inst(ProcessKind::Excursion, &[1.0, 2.0], &[0.0, 0.6])).unwrap();
        match r {
            Reduced::Instance(i) => {
                assert_eq!(i.s.as_slice(), &[1.0]);
                assert_eq!(i.t.as_slice(), &[0.6]);
            }
            other => panic!("{other:?}"),
        }
        let r = reduce_boundary(&inst(ProcessKind::Excursion, &[1.0, 2.0], &[0.0, 1.0])).unwrap();
        assert_eq!(r, Reduced::Exact { value: 1.0 });
    }

    #[test]
    fn reduction_rejects_interior() {
        assert!(matches!(reduce_boundary(&inst(ProcessKind::Excursion, &[1.0], &[0.5])), Err(Error::Usage(_))));
        // A meander is read at 1 − t, so t = 0 is not pinned.
        let m = inst(ProcessKind::bessel(1.0).unwrap(), &[1.0], &[0.0]);
        assert!(matches!(reduce_boundary(&m), Err(Error::Usage(_))));
        let m = inst(ProcessKind::bessel(1.0).unwrap(), &[1.0, 2.0], &[0.0, 1.0]);
        match reduce_boundary(&m).unwrap() {
            Reduced::Instance(i) => assert_eq!((i.s.as_slice(), i.t.as_slice()), (&[1.0][..], &[0.0][..])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mismatched_grids_rejected() {
        let e = DualityInstance::from_vecs(ProcessKind::Excursion, vec![1.0, 2.0], vec![0.5], "").unwrap_err();
        assert!(matches!(e, Error::Usage(_)));
    }

    #[test]
    fn time_reversal_relabels() {
        let i = inst(ProcessKind::Excursion, &[0.5, 1.0, 2.0], &[0.2, 0.5, 0.9]);
        let r = i.time_reversed().unwrap();
        let t: Vec<f64> = r.t.as_slice().to_vec();
        assert!((t[0] - 0.1).abs() < 1e-15 && (t[2] - 0.8).abs() < 1e-15);
        assert_eq!(r.s.increments(), vec![1.0, 0.5, 0.5]);
        assert!(inst(ProcessKind::bessel(1.0).unwrap(), &[1.0], &[0.5]).time_reversed().is_err());
    }

    #[test]
    fn exact_short_circuit_in_mc() {
        let i = inst(ProcessKind::Excursion, &[1.0], &[0.0]);
        let r = verify(&i, Methods::MC, &HarnessSettings::default(), 1000, SeededStream::new(1, 0)).unwrap();
        assert_eq!(r.rhs_mc.unwrap().n, 0);
        assert_eq!(r.rhs_mc.unwrap().value, 1.0);
        assert_eq!(r.lhs_mc.unwrap().value, 1.0);
        assert!(r.passed());
    }

    #[test]
    fn quad_verdict_on_simple_instance() {
        let i = inst(ProcessKind::Excursion, &[1.0], &[0.5]);
        let r = verify(&i, Methods::QUAD, &HarnessSettings::default(), 0, SeededStream::new(0, 0)).unwrap();
        assert!(r.passed(), "{:?}", r.verdict);
        assert!(r.quad_discrepancy.unwrap() <= 1e-6);
        assert!(r.mc_z_scores.is_empty());
        assert!(r.stream.is_none());
    }

    #[test]
    fn z_scores_cover_mc_pairs() {
        let i = inst(ProcessKind::Excursion, &[1.0], &[0.5]);
        let r = verify(&i, Methods::BOTH, &HarnessSettings::default(), 20_000, SeededStream::new(3, 0)).unwrap();
        let pairs: Vec<&str> = r.mc_z_scores.iter().map(|z| z.pair.as_str()).collect();
        assert_eq!(pairs, ["lhs_quad~lhs_mc", "lhs_quad~rhs_mc", "rhs_quad~lhs_mc", "rhs_quad~rhs_mc", "lhs_mc~rhs_mc"]);
    }

    #[test]
    fn random_instances_are_valid_and_reproducible() {
        let st = SeededStream::new(11, 4);
        let a = random_instance(st, 4, &KindFamily::ALL).unwrap();
        let b = random_instance(st, 4, &KindFamily::ALL).unwrap();
        assert_eq!(a, b);
        for id in 0..300 {
            let i = random_instance(SeededStream::new(2, id), 4, &KindFamily::ALL).unwrap();
            let mut prev = 0.0;
            for (k, &t) in i.t.as_slice().iter().enumerate() {
                let gap = if k == 0 && t == 0.0 { MIN_TIME_GAP } else { t - prev };
                assert!(gap >= MIN_TIME_GAP - 1e-12, "{i:?}");
                prev = t;
            }
            assert!(1.0 - prev >= MIN_TIME_GAP - 1e-12 || prev == 1.0);
        }
    }
}
