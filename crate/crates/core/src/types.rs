//! Grids, process kinds and estimates shared by every engine.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Observation times `0 ≤ t₁ < … < t_d ≤ 1`, with implicit `t₀ = 0`, `t_{d+1} = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return domain("time grid must contain at least one time");
        }
        if t.iter().any(|x| !x.is_finite()) {
            return domain("time grid entries must be finite");
        }
        if t[0] < 0.0 || t[t.len() - 1] > 1.0 {
            return domain("times must lie in [0, 1]");
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return domain("times must be strictly increasing");
        }
        Ok(Self(t))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    /// `t_{k+1} − t_k` for `k = 0..=d`, with the implicit endpoints.
    pub fn gaps(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        let mut prev = 0.0;
        for &t in self.0.iter().chain(std::iter::once(&1.0)) {
            out.push(t - prev);
            prev = t;
        }
        out
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(g: TimeGrid) -> Self {
        g.0
    }
}

/// Laplace arguments `0 < s₁ < … < s_d` (with `s₀ = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ArgGrid(Vec<f64>);

impl ArgGrid {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return domain("argument grid must contain at least one value");
        }
        if s.iter().any(|x| !x.is_finite()) {
            return domain("argument grid entries must be finite");
        }
        if s[0] <= 0.0 {
            return domain("arguments must be positive");
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            return domain("arguments must be strictly increasing");
        }
        Ok(Self(s))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s_k − s_{k−1}` for `k = 1..=d`.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.0
            .iter()
            .map(|&s| {
                let d = s - prev;
                prev = s;
                d
            })
            .collect()
    }
}

impl TryFrom<Vec<f64>> for ArgGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ArgGrid> for Vec<f64> {
    fn from(g: ArgGrid) -> Self {
        g.0
    }
}

/// One atom of a finite mixing law on (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub v: f64,
    pub weight: f64,
}

/// Which process sits on the left-hand side, and hence which weight sits on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessKind {
    Excursion,
    /// Generalized Bessel meander of dimensions `(δ, 3 − δ)`.
    BesselMeander { delta: f64 },
    /// Generalized Brownian meander randomized by a Beta(α, β) time.
    BetaMeander { alpha: f64, beta: f64 },
    /// Generalized Brownian meander randomized by a finite atomic law.
    DiscreteNu { atoms: Vec<Atom> },
}

/// Law of the randomizing time `V` of a generalized meander.
#[derive(Debug, Clone, PartialEq)]
pub enum MixingLaw {
    Beta { alpha: f64, beta: f64 },
    Atoms(Vec<Atom>),
}

impl ProcessKind {
    pub fn bessel(delta: f64) -> Result<Self> {
        let k = Self::BesselMeander { delta };
        k.validate()?;
        Ok(k)
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        let k = Self::BetaMeander { alpha, beta };
        k.validate()?;
        Ok(k)
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let k = Self::DiscreteNu { atoms: atoms.into_iter().map(|(v, weight)| Atom { v, weight }).collect() };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Excursion => Ok(()),
            Self::BesselMeander { delta } => {
                if delta.is_finite() && *delta > 0.0 && *delta < 3.0 {
                    Ok(())
                } else {
                    domain("delta must lie in (0,3)")
                }
            }
            Self::BetaMeander { alpha, beta } => {
                if alpha.is_finite() && beta.is_finite() && *alpha > 0.0 && *beta > 0.0 {
                    Ok(())
                } else {
                    domain("beta parameters must be positive")
                }
            }
            Self::DiscreteNu { atoms } => validate_atoms(atoms),
        }
    }

    /// `None` for the excursion, otherwise the law of `V`.
    pub fn mixing_law(&self) -> Option<MixingLaw> {
        match self {
            Self::Excursion => None,
            Self::BesselMeander { delta } => Some(MixingLaw::Beta { alpha: 0.5 * delta, beta: 1.5 - 0.5 * delta }),
            Self::BetaMeander { alpha, beta } => Some(MixingLaw::Beta { alpha: *alpha, beta: *beta }),
            Self::DiscreteNu { atoms } => Some(MixingLaw::Atoms(atoms.clone())),
        }
    }

    pub fn is_excursion(&self) -> bool {
        matches!(self, Self::Excursion)
    }
}

pub(crate) fn validate_atoms(atoms: &[Atom]) -> Result<()> {
    if atoms.is_empty() {
        return domain("nu needs at least one atom");
    }
    for a in atoms {
        if !(a.v.is_finite() && a.v > 0.0 && a.v <= 1.0) {
            return domain(format!("nu atoms must lie in (0,1], got {}", a.v));
        }
        if !(a.weight.is_finite() && a.weight > 0.0) {
            return domain(format!("nu weights must be positive, got {}", a.weight));
        }
    }
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    if (total - 1.0).abs() > 1e-9 {
        return domain(format!("nu weights must sum to 1, got {total}"));
    }
    Ok(())
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Excursion => write!(f, "excursion"),
            Self::BesselMeander { delta } => write!(f, "bessel:{delta}"),
            Self::BetaMeander { alpha, beta } => write!(f, "beta:{alpha},{beta}"),
            Self::DiscreteNu { atoms } => {
                write!(f, "nu:")?;
                for (i, a) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}:{}", a.v, a.weight)?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for ProcessKind {
    type Err = Error;

    /// `excursion`, `meander`, `comeander`, `bessel:<δ>`, `beta:<α>,<β>`, `nu:<v>:<w>[,...]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |x: &str| -> Result<f64> {
            x.trim().parse::<f64>().map_err(|_| Error::Domain(format!("cannot parse number '{x}'")))
        };
        let kind = match s {
            "excursion" => Self::Excursion,
            "meander" => Self::BesselMeander { delta: 1.0 },
            "comeander" => Self::BesselMeander { delta: 2.0 },
            _ => {
                if let Some(rest) = s.strip_prefix("bessel:") {
                    Self::BesselMeander { delta: num(rest)? }
                } else if let Some(rest) = s.strip_prefix("beta:") {
                    let (a, b) = rest
                        .split_once(',')
                        .ok_or_else(|| Error::Domain("beta kind expects 'beta:<alpha>,<beta>'".into()))?;
                    Self::BetaMeander { alpha: num(a)?, beta: num(b)? }
                } else if let Some(rest) = s.strip_prefix("nu:") {
                    let atoms = rest
                        .split(',')
                        .map(|pair| {
                            let (v, w) = pair
                                .split_once(':')
                                .ok_or_else(|| Error::Domain("nu kind expects 'nu:<v>:<w>[,...]'".into()))?;
                            Ok(Atom { v: num(v)?, weight: num(w)? })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Self::DiscreteNu { atoms }
                } else {
                    return domain(format!("unknown process kind '{s}'"));
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// A transition of `X`: elapsed time and the two endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelStep {
    pub elapsed: f64,
    pub from_x: f64,
    pub to_y: f64,
}

impl KernelStep {
    pub fn new(elapsed: f64, from_x: f64, to_y: f64) -> Result<Self> {
        if !(elapsed > 0.0) {
            return domain("kernel step needs positive elapsed time");
        }
        if !(from_x >= 0.0 && to_y >= 0.0) {
            return domain("kernel step coordinates must be non-negative");
        }
        Ok(Self { elapsed, from_x, to_y })
    }

    pub fn density(&self) -> f64 {
        crate::kernels::x_transition(self.elapsed, self.from_x, self.to_y).expect("validated step")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
    /// Known in closed form (boundary short-circuit).
    Exact,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Quadrature => "quadrature",
            Self::MonteCarlo => "monte_carlo",
            Self::Exact => "exact",
        })
    }
}

/// A number together with its uncertainty: an error bound for
/// quadrature, a standard error for Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0, method: Method::Exact }
    }
}
