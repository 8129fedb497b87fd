//! Problem files, report envelopes and per-sample CSV output.
//!
//! A problem file is UTF-8 JSON:
//!
//! ```json
//! {
//!   "n": 2, "p": 2,
//!   "entries": [
//!     {"i": 1, "j": 1, "terms": [{"exponents": [1, 0], "coeff": "1"}]},
//!     {"i": 1, "j": 2, "terms": [{"exponents": [0, 1], "coeff": "1/3"}]}
//!   ],
//!   "G": {"p": 1, "entries": [...]},
//!   "H": {"p": 1, "entries": [...]},
//!   "defaults": {"seed": 7, "samples": 1000, "region": {"type": "box", "lo": [-1, -1], "hi": [1, 1]}}
//! }
//! ```
//!
//! Indices are 1-based with `i ≤ j`. Coefficients are integers, decimals
//! (`"-0.25"`, `"1e-3"`) or `"num/den"`, all parsed exactly.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::harness::{CheckReport, Region, SampleStatus};
use crate::polynomial::{ExponentVector, Polynomial, Rational};
use crate::spectral::SymPolyMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    Text(String),
    Int(i64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exponents: Vec<u32>,
    pub coeff: CoeffSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub p: usize,
    pub entries: Vec<EntrySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum RegionSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Shell { inner: f64, outer: f64 },
}

impl RegionSpec {
    pub fn to_region(&self, n: usize) -> Region {
        match self {
            RegionSpec::Box { lo, hi } => Region::Box { lo: lo.clone(), hi: hi.clone() },
            RegionSpec::Ball { center, radius } => Region::Ball { center: center.clone(), radius: *radius },
            RegionSpec::Shell { inner, outer } => Region::Shell { n, inner: *inner, outer: *outer },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
}

impl Defaults {
    fn is_empty(&self) -> bool {
        *self == Defaults::default()
    }
}

/// The raw JSON schema of a problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub p: usize,
    pub entries: Vec<EntrySpec>,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<MatrixSpec>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Defaults::is_empty")]
    pub defaults: Defaults,
}

/// A validated problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub n: usize,
    pub f: SymPolyMatrix,
    pub g: Option<SymPolyMatrix>,
    pub h: Option<SymPolyMatrix>,
    pub defaults: Defaults,
}

fn parse_error(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

/// Exact value of an integer, decimal (with optional exponent) or `num/den` string.
pub fn parse_coefficient(text: &str) -> std::result::Result<Rational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty coefficient".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| format!("bad numerator in '{text}'"))?;
        let den: BigInt = den.trim().parse().map_err(|_| format!("bad denominator in '{text}'"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in '{text}'"));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => {
            let e: i64 = s[k + 1..].parse().map_err(|_| format!("bad exponent in '{text}'"))?;
            (&s[..k], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("no digits in '{text}'"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("'{text}' is not an integer, decimal or num/den"));
    }
    if exp.unsigned_abs() > 10_000 {
        return Err(format!("exponent out of range in '{text}'"));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| format!("bad digits in '{text}'"))?);
    let shift = exp - frac_part.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    let pow = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    Ok(if neg { -value } else { value })
}

fn coeff_value(c: &CoeffSpec) -> std::result::Result<Rational, String> {
    match c {
        CoeffSpec::Text(s) => parse_coefficient(s),
        CoeffSpec::Int(v) => Ok(Rational::from_integer(BigInt::from(*v))),
    }
}

fn build_matrix(n: usize, p: usize, entries: &[EntrySpec], label: &str) -> Result<SymPolyMatrix> {
    if p == 0 {
        return Err(parse_error(format!("{label}p"), "matrix order must be at least 1"));
    }
    let mut polys: Vec<Option<Polynomial>> = vec![None; p * p];
    let mut seen: BTreeSet<(usize, usize, ExponentVector)> = BTreeSet::new();
    for (e, entry) in entries.iter().enumerate() {
        let at = format!("{label}entries[{e}]");
        if entry.i < 1 || entry.i > entry.j || entry.j > p {
            return Err(parse_error(&at, format!("need 1 <= i <= j <= {p}, got i = {}, j = {}", entry.i, entry.j)));
        }
        let slot = polys[(entry.i - 1) * p + entry.j - 1].get_or_insert_with(|| Polynomial::zero(n));
        for (t, term) in entry.terms.iter().enumerate() {
            let tat = format!("{at}.terms[{t}]");
            if term.exponents.len() != n {
                return Err(parse_error(format!("{tat}.exponents"), format!("expected {n} exponents, got {}", term.exponents.len())));
            }
            let kappa = ExponentVector::new(term.exponents.clone());
            if !seen.insert((entry.i, entry.j, kappa.clone())) {
                return Err(parse_error(
                    &tat,
                    format!("duplicate term {:?} in entry ({}, {})", term.exponents, entry.i, entry.j),
                ));
            }
            let c = coeff_value(&term.coeff).map_err(|m| parse_error(format!("{tat}.coeff"), m))?;
            slot.add_term(kappa, c);
        }
    }
    let list = polys
        .into_iter()
        .enumerate()
        .filter_map(|(k, poly)| poly.map(|poly| (k / p, k % p, poly)))
        .collect();
    SymPolyMatrix::from_entries(n, p, list).map_err(|e| parse_error(format!("{label}entries"), e.to_string()))
}

impl ProblemFile {
    pub fn validate(&self) -> Result<Problem> {
        if self.n == 0 {
            return Err(parse_error("n", "need at least one variable"));
        }
        let f = build_matrix(self.n, self.p, &self.entries, "")?;
        let g = self.g.as_ref().map(|m| build_matrix(self.n, m.p, &m.entries, "G.")).transpose()?;
        let h = self.h.as_ref().map(|m| build_matrix(self.n, m.p, &m.entries, "H.")).transpose()?;
        if let Some(pt) = &self.defaults.point {
            if pt.len() != self.n {
                return Err(parse_error("defaults.point", format!("expected {} coordinates, got {}", self.n, pt.len())));
            }
        }
        if let Some(r) = &self.defaults.region {
            let region = r.to_region(self.n);
            if region.dim() != self.n {
                return Err(parse_error("defaults.region", format!("region dimension {} does not match n = {}", region.dim(), self.n)));
            }
            region.validate().map_err(|e| parse_error("defaults.region", e.to_string()))?;
        }
        Ok(Problem { n: self.n, f, g, h, defaults: self.defaults.clone() })
    }
}

pub fn parse_problem_str(text: &str) -> Result<Problem> {
    let file: ProblemFile = serde_json::from_str(text)
        .map_err(|e| parse_error(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    file.validate()
}

pub fn parse_problem(path: &Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_error(path.display().to_string(), e.to_string()))?;
    parse_problem_str(&text).map_err(|e| match e {
        Error::Parse { location, message } => parse_error(format!("{}: {location}", path.display()), message),
        other => other,
    })
}

fn matrix_spec(m: &SymPolyMatrix) -> (usize, Vec<EntrySpec>) {
    let entries = m
        .upper_entries()
        .filter(|(_, _, poly)| !poly.is_zero())
        .map(|(i, j, poly)| EntrySpec {
            i: i + 1,
            j: j + 1,
            terms: poly
                .terms()
                .map(|(k, c)| TermSpec { exponents: k.entries().to_vec(), coeff: CoeffSpec::Text(c.to_string()) })
                .collect(),
        })
        .collect();
    (m.p(), entries)
}

impl Problem {
    pub fn to_file(&self) -> ProblemFile {
        let (p, entries) = matrix_spec(&self.f);
        let side = |m: &Option<SymPolyMatrix>| {
            m.as_ref().map(|m| {
                let (p, entries) = matrix_spec(m);
                MatrixSpec { p, entries }
            })
        };
        ProblemFile { n: self.n, p, entries, g: side(&self.g), h: side(&self.h), defaults: self.defaults.clone() }
    }

    /// Canonical pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("problem files serialize")
    }

    pub fn from_matrix(f: SymPolyMatrix) -> Self {
        Self { n: f.n(), f, g: None, h: None, defaults: Defaults::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub version: &'static str,
    pub wall_time_seconds: f64,
}

/// Report envelope written by every command.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(command: &str, config: Value, results: Value, seed: Option<u64>, wall_time_seconds: f64) -> Self {
        Self {
            command: command.to_string(),
            config,
            results,
            provenance: Provenance { seed, version: env!("CARGO_PKG_VERSION"), wall_time_seconds },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Everything except the wall time; identical runs give identical payloads.
    pub fn payload(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Some(p) = v.get_mut("provenance").and_then(Value::as_object_mut) {
            p.remove("wall_time_seconds");
        }
        serde_json::to_string_pretty(&v).expect("reports serialize")
    }
}

/// Strips the wall time from a serialized report.
pub fn report_payload(json: &str) -> Result<String> {
    let mut v: Value = serde_json::from_str(json).map_err(|e| parse_error("report", e.to_string()))?;
    if let Some(p) = v.get_mut("provenance").and_then(Value::as_object_mut) {
        p.remove("wall_time_seconds");
    }
    Ok(serde_json::to_string_pretty(&v).expect("reports serialize"))
}

pub const CSV_VALUE_COLUMNS: [&str; 12] =
    ["f", "f_plus", "slope", "distance", "left", "right", "ratio", "log_left", "log_right", "log_ratio", "status", "index"];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Per-sample CSV: coordinates `x1..xn`, then [`CSV_VALUE_COLUMNS`].
/// Samples whose evaluation failed keep their index with status `error`.
pub fn check_csv(report: &CheckReport, n: usize) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=n).map(|k| format!("x{k}")).chain(CSV_VALUE_COLUMNS.iter().map(|s| s.to_string())).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for (idx, rec) in report.records.iter().enumerate() {
        match rec {
            Some(r) => {
                let status = match r.status {
                    SampleStatus::Counted => "counted",
                    SampleStatus::ZeroSide => "zero-side",
                    SampleStatus::OutsideDomain => "outside-domain",
                };
                let coords: Vec<String> = r.x.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    coords.join(","),
                    r.f,
                    r.f_plus,
                    opt(r.slope),
                    opt(r.distance),
                    r.left(),
                    r.right(),
                    r.ratio(),
                    r.log_left,
                    r.log_right,
                    r.log_ratio(),
                    status,
                    idx
                );
            }
            None => {
                let blanks = vec![""; n + CSV_VALUE_COLUMNS.len() - 2].join(",");
                let _ = writeln!(out, "{blanks},error,{idx}");
            }
        }
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}
