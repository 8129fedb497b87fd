//! Sampled verification of the error-bound inequalities, exponent fits and
//! the feasibility flow.
//!
//! Every check has the shape `c · S(x) ≤ B(x)` and estimates the best
//! constant `c = inf_x B(x)/S(x)` over a sample cloud. Ratios are formed in
//! the log domain, since certified exponents overwhelm double precision.

pub mod distance;
pub mod fit;
pub mod flow;
pub mod region;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{check_dim, input, Error, Result};
use crate::exponent::{certificate, CertificateKind, ExponentCertificate};
use crate::linalg::{dist, norm};
use crate::spectral::{SymPolyMatrix, TopEigenspace, DEFAULT_CLUSTER_TOL};

pub use distance::{FeasibleCloud, DEFAULT_FEAS_TOL, MAX_GRID_POINTS};
pub use fit::{empirical_exponent, ExponentFit};
pub use flow::{solve_feasibility_flow, solve_feasibility_flow_with, StepPolicy, Termination, Trajectory};
pub use region::{sample_region, Region, SampleCloud};

pub const DEFAULT_C_FLOOR: f64 = 1e-12;
pub const DEFAULT_RESOLUTION: f64 = 1e-2;
/// Fraction of samples that must evaluate cleanly for a verdict.
pub const MIN_USABLE_FRACTION: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckKind {
    GradientLocal,
    ErrorBoundLocal,
    Separation,
    Factorization,
    GlobalSeparation,
    GlobalKollar,
    CompactKollar,
    GlobalHolder,
    SlopeAtInfinity,
    EigenspaceStability,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::GradientLocal,
        CheckKind::ErrorBoundLocal,
        CheckKind::Separation,
        CheckKind::Factorization,
        CheckKind::GlobalSeparation,
        CheckKind::GlobalKollar,
        CheckKind::CompactKollar,
        CheckKind::GlobalHolder,
        CheckKind::SlopeAtInfinity,
        CheckKind::EigenspaceStability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::GradientLocal => "gradient-local",
            CheckKind::ErrorBoundLocal => "error-bound-local",
            CheckKind::Separation => "separation",
            CheckKind::Factorization => "factorization",
            CheckKind::GlobalSeparation => "global-separation",
            CheckKind::GlobalKollar => "global-kollar",
            CheckKind::CompactKollar => "compact-kollar",
            CheckKind::GlobalHolder => "global-holder",
            CheckKind::SlopeAtInfinity => "slope-at-infinity",
            CheckKind::EigenspaceStability => "eigenspace-stability",
        }
    }

    /// The certificate supplying the exponent, if the inequality has one.
    pub fn certificate_kind(self) -> Option<CertificateKind> {
        match self {
            CheckKind::GradientLocal => Some(CertificateKind::GradientLocal),
            CheckKind::ErrorBoundLocal => Some(CertificateKind::ErrorBoundLocal),
            CheckKind::Separation => Some(CertificateKind::Separation),
            CheckKind::Factorization => Some(CertificateKind::Factorization),
            CheckKind::GlobalSeparation => Some(CertificateKind::GlobalSeparation),
            CheckKind::GlobalKollar | CheckKind::CompactKollar => Some(CertificateKind::GlobalKollar),
            CheckKind::GlobalHolder => Some(CertificateKind::GlobalHolder),
            CheckKind::EigenspaceStability => Some(CertificateKind::EigenspaceStability),
            CheckKind::SlopeAtInfinity => None,
        }
    }

    pub fn needs_g(self) -> bool {
        matches!(self, CheckKind::Separation | CheckKind::GlobalSeparation | CheckKind::Factorization)
    }

    pub fn needs_h(self) -> bool {
        self == CheckKind::Factorization
    }

    pub fn needs_reference(self) -> bool {
        matches!(self, CheckKind::GradientLocal | CheckKind::EigenspaceStability)
    }

    fn needs_clouds(self) -> bool {
        matches!(
            self,
            CheckKind::ErrorBoundLocal
                | CheckKind::Separation
                | CheckKind::GlobalSeparation
                | CheckKind::GlobalKollar
                | CheckKind::GlobalHolder
        )
    }

    /// Kinds whose natural statement bounds the left side from above;
    /// their reports also carry `1/c`.
    pub fn is_upper_form(self) -> bool {
        matches!(self, CheckKind::Factorization | CheckKind::EigenspaceStability)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown check kind '{s}'")))
    }
}

impl Serialize for CheckKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Matrices a check draws on: `F` always, `G` for separation and
/// factorization, `H` (the compact domain `{H ⪯ 0}`) for factorization.
#[derive(Clone, Copy, Debug)]
pub struct Problems<'a> {
    pub f: &'a SymPolyMatrix,
    pub g: Option<&'a SymPolyMatrix>,
    pub h: Option<&'a SymPolyMatrix>,
}

impl<'a> Problems<'a> {
    pub fn single(f: &'a SymPolyMatrix) -> Self {
        Self { f, g: None, h: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckConfig {
    pub kind: CheckKind,
    #[serde(serialize_with = "ser_region")]
    pub region: Region,
    pub samples: usize,
    pub seed: u64,
    /// `x̄` for local kinds.
    pub reference: Option<Vec<f64>>,
    pub cluster_tol: f64,
    pub feas_tol: f64,
    /// Requested grid step of the feasible clouds.
    pub resolution: f64,
    /// Box gridded for the feasible clouds; the region's bounding box if unset.
    pub cloud_box: Option<(Vec<f64>, Vec<f64>)>,
    pub c_floor: f64,
}

impl CheckConfig {
    pub fn new(kind: CheckKind, region: Region, samples: usize, seed: u64) -> Self {
        Self {
            kind,
            region,
            samples,
            seed,
            reference: None,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            feas_tol: DEFAULT_FEAS_TOL,
            resolution: DEFAULT_RESOLUTION,
            cloud_box: None,
            c_floor: DEFAULT_C_FLOOR,
        }
    }

    pub fn with_reference(mut self, x: Vec<f64>) -> Self {
        self.reference = Some(x);
        self
    }

    pub fn with_resolution(mut self, h: f64) -> Self {
        self.resolution = h;
        self
    }
}

fn ser_region<S: Serializer>(r: &Region, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.describe())
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub(crate) fn ser_float<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn ser_opt_float<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_float(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStatus {
    /// Enters the infimum.
    Counted,
    /// The powered side vanishes; both sides are trivially tight.
    ZeroSide,
    /// Outside the inequality's domain (`H(x) ⪯ 0` fails, or `f ≤ 0` for the slope probe).
    OutsideDomain,
}

/// Both sides of the inequality at one sample.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub x: Vec<f64>,
    pub f: f64,
    pub f_plus: f64,
    pub slope: Option<f64>,
    pub distance: Option<f64>,
    /// `ln S(x)`.
    #[serde(serialize_with = "ser_float")]
    pub log_left: f64,
    /// `ln B(x)`.
    #[serde(serialize_with = "ser_float")]
    pub log_right: f64,
    pub status: SampleStatus,
}

impl SampleRecord {
    pub fn log_ratio(&self) -> f64 {
        if self.log_left == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        self.log_right - self.log_left
    }

    pub fn left(&self) -> f64 {
        self.log_left.exp()
    }

    pub fn right(&self) -> f64 {
        self.log_right.exp()
    }

    pub fn ratio(&self) -> f64 {
        self.log_ratio().exp()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CloudSummary {
    pub label: String,
    pub points: usize,
    pub candidates: usize,
    pub resolution: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub kind: CheckKind,
    pub certificate: Option<ExponentCertificate>,
    /// `inf B/S` over counted samples.
    #[serde(serialize_with = "ser_opt_float")]
    pub c_estimate: Option<f64>,
    #[serde(serialize_with = "ser_opt_float")]
    pub log_c_estimate: Option<f64>,
    /// `1/c` for kinds stated as `S ≤ C · B`.
    #[serde(serialize_with = "ser_opt_float")]
    pub upper_constant: Option<f64>,
    pub worst_point: Option<Vec<f64>>,
    pub worst_index: Option<usize>,
    pub sample_count: usize,
    pub usable: usize,
    pub excluded_zero_side: usize,
    pub excluded_outside_domain: usize,
    /// Counted samples with a finite ratio.
    pub constraining: usize,
    pub verdict: Verdict,
    pub c_floor: f64,
    pub clouds: Vec<CloudSummary>,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub records: Vec<Option<SampleRecord>>,
}

/// Precomputed data for evaluating one check kind pointwise.
pub struct CheckContext<'a> {
    pub kind: CheckKind,
    problems: Problems<'a>,
    pub certificate: Option<ExponentCertificate>,
    cluster_tol: f64,
    feas_tol: f64,
    reference: Option<Vec<f64>>,
    f_ref: f64,
    eig_ref: Option<TopEigenspace>,
    cloud_f: Option<FeasibleCloud>,
    cloud_g: Option<FeasibleCloud>,
    cloud_fg: Option<FeasibleCloud>,
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn ln0(v: f64) -> f64 {
    if v <= 0.0 {
        f64::NEG_INFINITY
    } else {
        v.ln()
    }
}

/// Certificate a check uses for its problems, with `d` the largest entry
/// degree of the matrices the inequality involves.
pub fn default_certificate(kind: CheckKind, problems: &Problems<'_>) -> Result<Option<ExponentCertificate>> {
    let Some(ck) = kind.certificate_kind() else {
        return Ok(None);
    };
    let f = problems.f;
    let n = f.n() as u64;
    let mut d = f.degree().max(1) as u64;
    let q = match kind {
        CheckKind::Separation | CheckKind::GlobalSeparation => {
            let g = problems.g.ok_or_else(|| Error::Input(format!("{kind} needs a second matrix G")))?;
            d = d.max(g.degree() as u64);
            Some(g.p() as u64)
        }
        CheckKind::Factorization => {
            let h = problems.h.ok_or_else(|| Error::Input("factorization needs a domain matrix H".into()))?;
            d = d.max(h.degree() as u64);
            Some(h.p() as u64)
        }
        _ => None,
    };
    Ok(Some(certificate(ck, n, f.p() as u64, d, q)?))
}

impl<'a> CheckContext<'a> {
    /// Validates inputs, builds the certificate and the feasible clouds.
    /// An empty cloud is reported through `Err(FeasibleSampleNotFound)`.
    pub fn new(problems: Problems<'a>, config: &CheckConfig, cert: Option<ExponentCertificate>) -> Result<Self> {
        let kind = config.kind;
        let n = problems.f.n();
        check_dim(n, config.region.dim(), "check region")?;
        config.region.validate()?;
        for (need, m, name) in [(kind.needs_g(), problems.g, "G"), (kind.needs_h(), problems.h, "H")] {
            match (need, m) {
                (true, None) => return input(format!("{kind} needs matrix {name}")),
                (_, Some(m)) => check_dim(n, m.n(), &format!("matrix {name} variables"))?,
                _ => {}
            }
        }
        if !(config.cluster_tol > 0.0) || !(config.feas_tol >= 0.0) || !(config.c_floor > 0.0) {
            return input("cluster_tol and c_floor must be positive, feas_tol nonnegative");
        }
        let certificate = match cert {
            Some(c) => {
                if Some(c.kind) != kind.certificate_kind() {
                    return input(format!("certificate kind {} does not match check {kind}", c.kind));
                }
                Some(c)
            }
            None => default_certificate(kind, &problems)?,
        };
        let reference = if kind.needs_reference() {
            let r = config.reference.clone().ok_or_else(|| Error::Input(format!("{kind} needs a reference point")))?;
            check_dim(n, r.len(), "reference point")?;
            Some(r)
        } else {
            None
        };
        let f_ref = match &reference {
            Some(r) => problems.f.f(r)?,
            None => 0.0,
        };
        let eig_ref = match (&reference, kind) {
            (Some(r), CheckKind::EigenspaceStability) => Some(problems.f.top_eigenspace(r, config.cluster_tol)?),
            _ => None,
        };
        let mut ctx = Self {
            kind,
            problems,
            certificate,
            cluster_tol: config.cluster_tol,
            feas_tol: config.feas_tol,
            reference,
            f_ref,
            eig_ref,
            cloud_f: None,
            cloud_g: None,
            cloud_fg: None,
        };
        if kind.needs_clouds() {
            let (lo, hi) = config.cloud_box.clone().unwrap_or_else(|| config.region.bounding_box());
            let grid = |fs: &[&SymPolyMatrix]| FeasibleCloud::from_grid(fs, &lo, &hi, config.resolution, config.feas_tol);
            let f = problems.f;
            match kind {
                CheckKind::Separation | CheckKind::GlobalSeparation => {
                    let g = problems.g.expect("validated above");
                    ctx.cloud_f = Some(grid(&[f])?);
                    ctx.cloud_g = Some(grid(&[g])?);
                    ctx.cloud_fg = Some(grid(&[f, g])?);
                }
                _ => ctx.cloud_f = Some(grid(&[f])?),
            }
        }
        Ok(ctx)
    }

    pub fn clouds(&self) -> Vec<CloudSummary> {
        [("S_F", &self.cloud_f), ("S_G", &self.cloud_g), ("S_F and S_G", &self.cloud_fg)]
            .into_iter()
            .filter_map(|(label, c)| {
                c.as_ref().map(|c| CloudSummary {
                    label: label.to_string(),
                    points: c.len(),
                    candidates: c.candidates,
                    resolution: c.resolution,
                })
            })
            .collect()
    }

    fn empty_cloud(&self) -> Option<String> {
        self.clouds()
            .into_iter()
            .find(|c| c.points == 0)
            .map(|c| format!("no grid point of {} among {} candidates satisfies f <= {}", c.label, c.candidates, self.feas_tol))
    }

    fn cert(&self) -> &ExponentCertificate {
        self.certificate.as_ref().expect("kind has a certificate")
    }

    /// Distance to a cloud, zero when `x` itself is feasible for `fs`.
    fn distance(&self, cloud: &Option<FeasibleCloud>, fs: &[&SymPolyMatrix], x: &[f64]) -> Result<f64> {
        let mut feasible = true;
        for f in fs {
            if f.f(x)? > self.feas_tol {
                feasible = false;
                break;
            }
        }
        if feasible {
            return Ok(0.0);
        }
        cloud.as_ref().expect("cloud built for this kind").distance(x)
    }

    /// Evaluates both sides at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<SampleRecord> {
        let f = self.problems.f;
        let (fx, f_plus) = f.largest_eigenvalue(x)?;
        let mut rec = SampleRecord {
            x: x.to_vec(),
            f: fx,
            f_plus,
            slope: None,
            distance: None,
            log_left: 0.0,
            log_right: 0.0,
            status: SampleStatus::Counted,
        };
        // `right_powered`: whether the zero-side exclusion applies to B (else S).
        let right_powered;
        match self.kind {
            CheckKind::GradientLocal => {
                let slope = f.subdiff_model(x, self.cluster_tol)?.clarke_slope().slope;
                rec.slope = Some(slope);
                rec.log_left = self.cert().log_pow(fx - self.f_ref);
                rec.log_right = ln0(slope);
                right_powered = false;
            }
            CheckKind::ErrorBoundLocal => {
                let d = self.distance(&self.cloud_f, &[f], x)?;
                rec.distance = Some(d);
                rec.log_left = ln0(d);
                rec.log_right = self.cert().log_pow(f_plus);
                right_powered = true;
            }
            CheckKind::GlobalHolder => {
                let d = self.distance(&self.cloud_f, &[f], x)?;
                rec.distance = Some(d);
                rec.log_left = ln0(d);
                rec.log_right = log_add(self.cert().log_pow(f_plus), ln0(f_plus));
                right_powered = true;
            }
            CheckKind::Separation | CheckKind::GlobalSeparation => {
                let g = self.problems.g.expect("validated");
                let df = self.distance(&self.cloud_f, &[f], x)?;
                let dg = self.distance(&self.cloud_g, &[g], x)?;
                let dfg = self.distance(&self.cloud_fg, &[f, g], x)?;
                rec.distance = Some(dfg);
                if self.kind == CheckKind::Separation {
                    rec.log_left = ln0(dfg);
                    rec.log_right = self.cert().log_pow(df + dg);
                    right_powered = true;
                } else {
                    rec.log_left = scaled_power(self.cert(), dfg, x);
                    rec.log_right = ln0(df + dg);
                    right_powered = false;
                }
            }
            CheckKind::GlobalKollar => {
                let d = self.distance(&self.cloud_f, &[f], x)?;
                rec.distance = Some(d);
                rec.log_left = scaled_power(self.cert(), d, x);
                rec.log_right = ln0(f_plus);
                right_powered = false;
            }
            CheckKind::CompactKollar => {
                let r = norm(x);
                if r == 0.0 {
                    rec.status = SampleStatus::OutsideDomain;
                }
                rec.log_left = -self.cert().scale_log(ln0(r));
                rec.log_right = ln0(f_plus);
                right_powered = false;
            }
            CheckKind::Factorization => {
                let g = self.problems.g.expect("validated");
                let h = self.problems.h.expect("validated");
                if h.f(x)? > self.feas_tol {
                    rec.status = SampleStatus::OutsideDomain;
                }
                let g_plus = g.largest_eigenvalue(x)?.1;
                rec.log_left = ln0(g_plus);
                rec.log_right = self.cert().log_pow(f_plus);
                right_powered = true;
            }
            CheckKind::SlopeAtInfinity => {
                if fx <= 0.0 {
                    rec.status = SampleStatus::OutsideDomain;
                }
                let slope = f.subdiff_model(x, self.cluster_tol)?.clarke_slope().slope;
                rec.slope = Some(slope);
                rec.log_left = 0.0;
                rec.log_right = ln0(slope);
                right_powered = false;
            }
            CheckKind::EigenspaceStability => {
                let r = self.reference.as_ref().expect("validated");
                let e = f.top_eigenspace(x, self.cluster_tol)?;
                let d = e.distance_into(self.eig_ref.as_ref().expect("validated"))?;
                rec.distance = Some(d);
                rec.log_left = ln0(d);
                rec.log_right = self.cert().log_pow(dist(x, r));
                right_powered = true;
            }
        }
        if rec.status == SampleStatus::Counted {
            let zero = if right_powered { rec.log_right } else { rec.log_left };
            if zero == f64::NEG_INFINITY {
                rec.status = SampleStatus::ZeroSide;
            }
        }
        if rec.log_left.is_nan() || rec.log_right.is_nan() {
            return Err(Error::Numeric("check: NaN in an inequality side".into()));
        }
        Ok(rec)
    }
}

/// `ln((dist/(1 + ‖x‖²))^R)`.
fn scaled_power(cert: &ExponentCertificate, d: f64, x: &[f64]) -> f64 {
    if d <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let nx = norm(x);
    cert.scale_log(d.ln() - (nx * nx).ln_1p())
}

/// Runs `config.kind` over `config.samples` points of `config.region`.
pub fn run_inequality_check(problems: Problems<'_>, config: &CheckConfig, cert: Option<ExponentCertificate>) -> Result<CheckReport> {
    let cloud = sample_region(&config.region, config.samples, config.seed)?;
    let ctx = match CheckContext::new(problems, config, cert.clone()) {
        Ok(c) => c,
        Err(Error::FeasibleSampleNotFound(msg)) => {
            return Ok(inconclusive(config, cert, vec![msg], Vec::new()));
        }
        Err(e) => return Err(e),
    };
    if let Some(msg) = ctx.empty_cloud() {
        return Ok(inconclusive(config, ctx.certificate.clone(), vec![msg], ctx.clouds()));
    }
    let records: Vec<Option<SampleRecord>> = cloud.points.par_iter().map(|x| ctx.evaluate(x).ok()).collect();
    let usable = records.iter().flatten().count();
    let excluded_zero_side = records.iter().flatten().filter(|r| r.status == SampleStatus::ZeroSide).count();
    let excluded_outside_domain = records.iter().flatten().filter(|r| r.status == SampleStatus::OutsideDomain).count();
    let mut worst: Option<(usize, f64)> = None;
    let mut constraining = 0;
    for (i, r) in records.iter().enumerate() {
        let Some(r) = r else { continue };
        if r.status != SampleStatus::Counted {
            continue;
        }
        let lr = r.log_ratio();
        if lr == f64::INFINITY {
            continue;
        }
        constraining += 1;
        if worst.is_none_or(|(_, w)| lr < w) {
            worst = Some((i, lr));
        }
    }
    let mut diagnostics = Vec::new();
    let usable_ok = usable as f64 >= MIN_USABLE_FRACTION * config.samples as f64;
    if !usable_ok {
        diagnostics.push(format!("only {usable} of {} samples evaluated cleanly", config.samples));
    }
    if constraining == 0 {
        diagnostics.push("no sample constrains the constant (all excluded or with infinite ratio)".into());
    }
    let verdict = match worst {
        Some((_, lc)) if usable_ok => {
            if lc > config.c_floor.ln() {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        }
        _ => Verdict::Inconclusive,
    };
    let log_c = worst.map(|w| w.1);
    let c = log_c.map(f64::exp);
    Ok(CheckReport {
        kind: config.kind,
        certificate: ctx.certificate.clone(),
        c_estimate: c,
        log_c_estimate: log_c,
        upper_constant: if config.kind.is_upper_form() { log_c.map(|l| (-l).exp()) } else { None },
        worst_point: worst.map(|(i, _)| cloud.points[i].clone()),
        worst_index: worst.map(|w| w.0),
        sample_count: config.samples,
        usable,
        excluded_zero_side,
        excluded_outside_domain,
        constraining,
        verdict,
        c_floor: config.c_floor,
        clouds: ctx.clouds(),
        diagnostics,
        records,
    })
}

fn inconclusive(config: &CheckConfig, certificate: Option<ExponentCertificate>, diagnostics: Vec<String>, clouds: Vec<CloudSummary>) -> CheckReport {
    CheckReport {
        kind: config.kind,
        certificate,
        c_estimate: None,
        log_c_estimate: None,
        upper_constant: None,
        worst_point: None,
        worst_index: None,
        sample_count: config.samples,
        usable: 0,
        excluded_zero_side: 0,
        excluded_outside_domain: 0,
        constraining: 0,
        verdict: Verdict::Inconclusive,
        c_floor: config.c_floor,
        clouds,
        diagnostics,
        records: Vec::new(),
    }
}
