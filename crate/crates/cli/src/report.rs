//! Serialized forms of reports, sample dumps and density tables.

use std::fmt;

use exdual::harness::VerificationReport;
use exdual::mc::{McEstimate, SamplePath};
use exdual::{Estimate, Method};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

pub const SCHEMA_VERSION: u32 = 1;

/// A number written with 17 significant digits. Non-finite values are
/// written as the strings `"inf"`, `"-inf"` and `"nan"`.
#[derive(Debug, Clone, Copy)]
pub struct Num(pub f64);

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits() || self.0 == other.0
    }
}

pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(fmt_num(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_str(&fmt_num(self.0))
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                match v {
                    "inf" => Ok(Num(f64::INFINITY)),
                    "-inf" => Ok(Num(f64::NEG_INFINITY)),
                    "nan" => Ok(Num(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub exdual: String,
    pub schema: u32,
}

impl Versions {
    pub fn current() -> Self {
        Self { exdual: exdual::VERSION.to_string(), schema: SCHEMA_VERSION }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOut {
    pub kind: String,
    pub s: Vec<Num>,
    pub t: Vec<Num>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOut {
    pub value: Num,
    pub error: Num,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ess: Option<Num>,
}

impl EstimateOut {
    fn quad(e: &Estimate) -> Self {
        Self { value: Num(e.value), error: Num(e.error), method: e.method, n: None, ess: None }
    }

    fn mc(e: &McEstimate) -> Self {
        let shown = exdual::harness::mc_as_estimate(e);
        let diagnostics = e.n > 0;
        Self {
            value: Num(shown.value),
            error: Num(shown.error),
            method: shown.method,
            n: diagnostics.then_some(e.n),
            ess: diagnostics.then_some(Num(e.ess)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    pub lhs_quad: Option<EstimateOut>,
    pub rhs_quad: Option<EstimateOut>,
    pub lhs_mc: Option<EstimateOut>,
    pub rhs_mc: Option<EstimateOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZOut {
    pub pair: String,
    pub z: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictOut {
    pub pass: bool,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportOut {
    pub instance: InstanceOut,
    pub estimates: Estimates,
    pub discrepancy: Option<Num>,
    pub z_scores: Vec<ZOut>,
    pub verdict: VerdictOut,
    pub seed: u64,
    pub stream_id: u64,
    pub versions: Versions,
}

impl ReportOut {
    pub fn new(r: &VerificationReport, seed: u64, stream_id: u64) -> Self {
        let inst = &r.instance;
        Self {
            instance: InstanceOut {
                kind: inst.kind.to_string(),
                s: nums(inst.s.as_slice()),
                t: nums(inst.t.as_slice()),
                label: inst.label.clone(),
            },
            estimates: Estimates {
                lhs_quad: r.lhs_quad.as_ref().map(EstimateOut::quad),
                rhs_quad: r.rhs_quad.as_ref().map(EstimateOut::quad),
                lhs_mc: r.lhs_mc.as_ref().map(EstimateOut::mc),
                rhs_mc: r.rhs_mc.as_ref().map(EstimateOut::mc),
            },
            discrepancy: r.quad_discrepancy.map(Num),
            z_scores: r.mc_z_scores.iter().map(|z| ZOut { pair: z.pair.clone(), z: Num(z.z) }).collect(),
            verdict: VerdictOut { pass: r.verdict.pass, reasons: r.verdict.reasons.clone() },
            seed,
            stream_id,
            versions: Versions::current(),
        }
    }
}

/// Output of `verify`: one report plus the wall-clock stamp, which is
/// the only field outside the determinism contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDoc {
    #[serde(flatten)]
    pub report: ReportOut,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDoc {
    pub reports: Vec<ReportOut>,
    pub passed: usize,
    pub total: usize,
    pub seed: u64,
    pub versions: Versions,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathOut {
    pub source: String,
    pub times: Vec<Num>,
    pub values: Vec<Num>,
    pub seed: u64,
    pub stream_id: u64,
}

impl PathOut {
    pub fn new(p: &SamplePath, source: String) -> Self {
        Self { source, times: nums(&p.times), values: nums(&p.values), seed: p.stream.seed, stream_id: p.stream.stream_id }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDoc {
    pub paths: Vec<PathOut>,
    pub versions: Versions,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub point: Vec<Num>,
    pub value: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityDoc {
    pub function: String,
    pub parameters: Vec<(String, String)>,
    pub rows: Vec<DensityRow>,
    pub versions: Versions,
    pub timestamp: u64,
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report types serialize");
    s.push('\n');
    s
}

fn join(v: &[Num]) -> String {
    v.iter().map(|x| fmt_num(x.0)).collect::<Vec<_>>().join(";")
}

const ESTIMATE_COLUMNS: [&str; 4] = ["lhs_quad", "rhs_quad", "lhs_mc", "rhs_mc"];

/// One row per report, the nested fields flattened.
pub fn reports_csv(reports: &[ReportOut], timestamp: u64) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["label", "kind", "s", "t"].iter().map(|s| s.to_string()).collect();
    for c in ESTIMATE_COLUMNS {
        for f in ["value", "error", "method"] {
            header.push(format!("{c}_{f}"));
        }
    }
    header.extend(
        ["discrepancy", "z_scores", "pass", "reasons", "seed", "stream_id", "version", "timestamp"].iter().map(|s| s.to_string()),
    );
    w.write_record(&header).expect("in-memory write");
    for r in reports {
        let mut row = vec![r.instance.label.clone(), r.instance.kind.clone(), join(&r.instance.s), join(&r.instance.t)];
        let e = &r.estimates;
        for est in [&e.lhs_quad, &e.rhs_quad, &e.lhs_mc, &e.rhs_mc] {
            match est {
                Some(x) => row.extend([fmt_num(x.value.0), fmt_num(x.error.0), x.method.to_string()]),
                None => row.extend([String::new(), String::new(), String::new()]),
            }
        }
        row.push(r.discrepancy.map(|d| fmt_num(d.0)).unwrap_or_default());
        row.push(r.z_scores.iter().map(|z| format!("{}={}", z.pair, fmt_num(z.z.0))).collect::<Vec<_>>().join(";"));
        row.push(r.verdict.pass.to_string());
        row.push(r.verdict.reasons.join("; "));
        row.push(r.seed.to_string());
        row.push(r.stream_id.to_string());
        row.push(r.versions.exdual.clone());
        row.push(timestamp.to_string());
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

pub fn paths_csv(paths: &[PathOut]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["path", "source", "time", "value", "seed", "stream_id"]).expect("in-memory write");
    for (i, p) in paths.iter().enumerate() {
        for (t, v) in p.times.iter().zip(&p.values) {
            w.write_record([i.to_string(), p.source.clone(), fmt_num(t.0), fmt_num(v.0), p.seed.to_string(), p.stream_id.to_string()])
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

pub fn density_csv(doc: &DensityDoc) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["function", "point", "value"]).expect("in-memory write");
    for r in &doc.rows {
        w.write_record([doc.function.clone(), join(&r.point), fmt_num(r.value.0)]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}
