//! Command-line surface: argument parsing, dispatch and exit codes.
//!
//! Exit codes: `0` PASS / SUCCESS, `1` FAIL / DEGENERATE, `2` INCONCLUSIVE,
//! `3` usage or input error.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exponent::{certificate, CertificateKind, ExponentCertificate};
use crate::harness::{
    empirical_exponent, run_inequality_check, solve_feasibility_flow_with, CheckConfig, CheckKind, Problems, Region,
    StepPolicy, Termination, Verdict,
};
use crate::io::{check_csv, parse_problem, write_text, Problem, Report};
use crate::newton::{enumerate_faces_at_infinity, is_convenient, Face, NewtonPolyhedron};
use crate::nondegen::{gamma_of_matrix, nondegeneracy_scan, theorem13_preconditions, FaceVerdict, ScanReport};
use crate::spectral::{SymPolyMatrix, DEFAULT_CLUSTER_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "eigbound", version, about = "Error bounds for the largest eigenvalue of symmetric polynomial matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cluster tolerance for the top eigenvalue.
    #[arg(long)]
    pub cluster_tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct RegionArgs {
    /// Box bounds; each side is a scalar or a comma-separated vector.
    #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, allow_hyphen_values = true)]
    pub box_: Option<Vec<String>>,
    /// Ball center (comma-separated) and radius.
    #[arg(long, num_args = 2, value_names = ["CENTER", "RADIUS"], allow_negative_numbers = true, allow_hyphen_values = true)]
    pub ball: Option<Vec<String>>,
    /// Shell radii `R1 <= |x| <= R2`.
    #[arg(long, num_args = 2, value_names = ["R1", "R2"])]
    pub shell: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// F(x), its spectrum and f(x) = λ_max.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Clarke slope and minimum-norm subgradient.
    Slope {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Directional derivative f'(x; d).
    Ddir {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
    },
    /// Exponent certificate from (n, p, d) or from a problem file.
    Exponent {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Newton polyhedron of F, its faces at infinity and the global-bound preconditions.
    Newton {
        #[command(flatten)]
        common: Common,
    },
    /// Sampled search for non-degeneracy witnesses on every face at infinity.
    Nondegen {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Sampled check of one inequality.
    Check {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long)]
        kind: String,
        /// Reference point for local kinds.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Feasibility tolerance of the sampled feasible sets.
        #[arg(long)]
        tol: Option<f64>,
        /// Grid step of the sampled feasible sets.
        #[arg(long)]
        resolution: Option<f64>,
        /// Per-sample CSV output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Least-squares estimate of the local gradient exponent.
    ExponentFit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Subgradient flow of [f]₊ toward the feasible set.
    Flow {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Initial trial step: `polyak` or `unit`.
        #[arg(long, default_value = "polyak")]
        step: String,
    },
}

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_BUDGET: usize = 500;
pub const DEFAULT_FLOW_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Outcome of one command.
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

fn parse_vector(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("{what}: '{t}' is not a number"))))
        .collect()
}

fn load(common: &Common) -> Result<Problem> {
    let path = common.problem.as_ref().ok_or_else(|| usage("--problem is required"))?;
    parse_problem(path)
}

fn point_arg(point: &Option<String>, problem: &Problem, what: &str) -> Result<Vec<f64>> {
    let x = match point {
        Some(s) => parse_vector(s, what)?,
        None => problem.defaults.point.clone().ok_or_else(|| usage(format!("{what} is required")))?,
    };
    if x.len() != problem.n {
        return Err(usage(format!("{what}: expected {} coordinates, got {}", problem.n, x.len())));
    }
    Ok(x)
}

fn side(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v = parse_vector(s, what)?;
    match v.len() {
        1 => Ok(vec![v[0]; n]),
        k if k == n => Ok(v),
        k => Err(usage(format!("{what}: expected 1 or {n} values, got {k}"))),
    }
}

fn region_arg(args: &RegionArgs, problem: &Problem) -> Result<Region> {
    let n = problem.n;
    let given = [args.box_.is_some(), args.ball.is_some(), args.shell.is_some()].iter().filter(|b| **b).count();
    if given > 1 {
        return Err(usage("give at most one of --box, --ball, --shell"));
    }
    let region = if let Some(b) = &args.box_ {
        Region::Box { lo: side(&b[0], n, "--box LO")?, hi: side(&b[1], n, "--box HI")? }
    } else if let Some(b) = &args.ball {
        let radius = b[1].parse::<f64>().map_err(|_| usage("--ball RADIUS is not a number"))?;
        Region::Ball { center: side(&b[0], n, "--ball CENTER")?, radius }
    } else if let Some(s) = &args.shell {
        Region::Shell { n, inner: s[0], outer: s[1] }
    } else if let Some(r) = &problem.defaults.region {
        r.to_region(n)
    } else {
        return Err(usage("a region is required: --box, --ball or --shell"));
    };
    region.validate()?;
    Ok(region)
}

fn matrix_json(m: &SymPolyMatrix) -> Value {
    let rows: Vec<Vec<String>> = (0..m.p()).map(|i| (0..m.p()).map(|j| m.entry(i, j).to_string()).collect()).collect();
    json!(rows)
}

fn dense_json(m: &nalgebra::DMatrix<f64>) -> Value {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
    json!(rows)
}

fn face_json(face: &Face) -> Value {
    json!({
        "vertices": face.vertices.iter().map(|v| v.entries().to_vec()).collect::<Vec<_>>(),
        "witness_q": face.witness_q.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "support_value": face.support_value.to_string(),
        "at_infinity": face.at_infinity,
    })
}

fn polyhedron_json(g: &NewtonPolyhedron) -> Value {
    json!({
        "vertices": g.vertices().iter().map(|v| v.entries().to_vec()).collect::<Vec<_>>(),
        "convenient": is_convenient(g),
    })
}

fn scan_json(scan: &ScanReport) -> Value {
    let faces: Vec<Value> = scan
        .faces
        .iter()
        .map(|fs| {
            let mut v = json!({
                "face": face_json(&fs.face),
                "principal_matrix": matrix_json(&fs.principal),
                "samples_tried": fs.samples_tried,
            });
            match &fs.verdict {
                FaceVerdict::Degenerate(w) => {
                    v["verdict"] = json!("DEGENERATE");
                    v["witness"] = json!({
                        "x": w.x,
                        "omega": dense_json(&w.omega),
                        "residuals": w.residuals,
                        "trace_residual": w.trace_residual,
                    });
                }
                FaceVerdict::NoWitnessFound { budget } => {
                    v["verdict"] = json!("NO-WITNESS-FOUND");
                    v["budget"] = json!(budget);
                }
            }
            v
        })
        .collect();
    json!({ "verdict": scan.verdict_label(), "budget": scan.budget, "seed": scan.seed, "faces": faces })
}

fn cert_json(c: &ExponentCertificate) -> Value {
    serde_json::to_value(c).expect("certificates serialize")
}

fn problem_dims(problem: &Problem) -> (u64, u64, u64) {
    (problem.n as u64, problem.f.p() as u64, problem.f.degree().max(1) as u64)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> std::result::Result<Outcome, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return Err((code, e.to_string()));
        }
    };
    let start = Instant::now();
    match dispatch(&cli.command, start) {
        Ok(o) => Ok(o),
        Err(e) => {
            let code = match e {
                Error::Input(_) | Error::Parse { .. } => EXIT_USAGE,
                _ => EXIT_INCONCLUSIVE,
            };
            Err((code, e.to_string()))
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(args) {
        Ok(outcome) => outcome.exit_code,
        Err((code, msg)) => {
            if code == EXIT_OK {
                print!("{msg}");
            } else {
                eprintln!("{msg}");
            }
            code
        }
    }
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::Eval { common, .. }
        | Command::Slope { common, .. }
        | Command::Ddir { common, .. }
        | Command::Exponent { common, .. }
        | Command::Newton { common }
        | Command::Nondegen { common, .. }
        | Command::Check { common, .. }
        | Command::ExponentFit { common, .. }
        | Command::Flow { common, .. } => common,
    }
}

fn dispatch(cmd: &Command, start: Instant) -> Result<Outcome> {
    let common = common_of(cmd);
    let (name, config, results, seed, exit_code, side_output) = execute(cmd)?;
    let report = Report::new(name, config, results, seed, start.elapsed().as_secs_f64());
    if let Some((path, text)) = side_output {
        write_text(&path, &text)?;
    }
    let json = report.to_json();
    // A closed stdout (e.g. piped into `head`) is not an error of the run.
    let mut out = std::io::stdout().lock();
    match &common.report {
        Some(path) => {
            write_text(path, &json)?;
            let _ = writeln!(out, "{name}: exit {exit_code}, report written to {}", path.display());
        }
        None => {
            let _ = writeln!(out, "{json}");
        }
    }
    Ok(Outcome { report, exit_code })
}

type Executed = (&'static str, Value, Value, Option<u64>, i32, Option<(PathBuf, String)>);

fn execute(cmd: &Command) -> Result<Executed> {
    match cmd {
        Command::Eval { common, point } => {
            let problem = load(common)?;
            let x = point_arg(point, &problem, "--point")?;
            let m = problem.f.eval_matrix(&x)?;
            let e = crate::linalg::jacobi_eigen(&m)?;
            let results = json!({
                "f": e.max(),
                "f_plus": e.max().max(0.0),
                "spectrum": e.values,
                "matrix": dense_json(&m),
            });
            Ok(("eval", json!({ "point": x }), results, None, EXIT_OK, None))
        }
        Command::Slope { common, point } => {
            let problem = load(common)?;
            let x = point_arg(point, &problem, "--point")?;
            let tol = common.cluster_tol.unwrap_or(DEFAULT_CLUSTER_TOL);
            let model = problem.f.subdiff_model(&x, tol)?;
            let s = model.clarke_slope();
            let results = json!({
                "slope": s.slope,
                "subgradient": s.subgradient,
                "multiplicity": model.multiplicity(),
                "lambda_max": model.eigenspace.lambda_max,
                "density": dense_json(&s.density),
                "converged": s.converged,
                "iterations": s.iterations,
                "gap": s.gap,
            });
            Ok(("slope", json!({ "point": x, "cluster_tol": tol }), results, None, EXIT_OK, None))
        }
        Command::Ddir { common, point, dir } => {
            let problem = load(common)?;
            let x = point_arg(point, &problem, "--point")?;
            let d = parse_vector(dir, "--dir")?;
            let tol = common.cluster_tol.unwrap_or(DEFAULT_CLUSTER_TOL);
            let v = problem.f.subdiff_model(&x, tol)?.directional_derivative(&d)?;
            Ok(("ddir", json!({ "point": x, "dir": d, "cluster_tol": tol }), json!({ "directional_derivative": v }), None, EXIT_OK, None))
        }
        Command::Exponent { common, kind, n, p, d, q } => {
            let kind: CertificateKind = kind.parse()?;
            let (n, p, d, q) = match &common.problem {
                Some(_) => {
                    let problem = load(common)?;
                    let (pn, pp, pd) = problem_dims(&problem);
                    let pq = match kind {
                        CertificateKind::Factorization => problem.h.as_ref().map(|h| h.p() as u64),
                        _ => problem.g.as_ref().map(|g| g.p() as u64),
                    };
                    (n.unwrap_or(pn), p.unwrap_or(pp), d.unwrap_or(pd), q.or(pq))
                }
                None => (
                    n.ok_or_else(|| usage("--n is required without --problem"))?,
                    p.ok_or_else(|| usage("--p is required without --problem"))?,
                    d.ok_or_else(|| usage("--d is required without --problem"))?,
                    *q,
                ),
            };
            let c = certificate(kind, n, p, d, q)?;
            let config = json!({ "kind": kind.name(), "n": n, "p": p, "d": d, "q": q });
            Ok(("exponent", config, json!({ "certificate": cert_json(&c) }), None, EXIT_OK, None))
        }
        Command::Newton { common } => {
            let problem = load(common)?;
            let seed = common.seed.or(problem.defaults.seed).unwrap_or(DEFAULT_SEED);
            let gamma = gamma_of_matrix(&problem.f)?;
            let faces = if gamma.is_empty() { Vec::new() } else { enumerate_faces_at_infinity(&gamma)? };
            let pre = theorem13_preconditions(&problem.f, seed)?;
            let p = problem.f.p();
            let entries: Vec<Value> = problem
                .f
                .upper_entries()
                .map(|(i, j, poly)| json!({ "i": i + 1, "j": j + 1, "polyhedron": polyhedron_json(&NewtonPolyhedron::of_polynomial(poly)) }))
                .collect();
            let results = json!({
                "gamma": polyhedron_json(&gamma),
                "entries": entries,
                "faces_at_infinity": faces.iter().map(face_json).collect::<Vec<_>>(),
                "preconditions": {
                    "diagonal_convenient": pre.convenient,
                    "containment": pre.containment.iter().map(|(i, j, c)| json!({ "i": i + 1, "j": j + 1, "contained": c })).collect::<Vec<_>>(),
                    "feasible_point": pre.feasible_point,
                    "holds": pre.holds(),
                },
                "p": p,
            });
            Ok(("newton", json!({ "seed": seed }), results, Some(seed), EXIT_OK, None))
        }
        Command::Nondegen { common, budget } => {
            let problem = load(common)?;
            let seed = common.seed.or(problem.defaults.seed).unwrap_or(DEFAULT_SEED);
            let budget = budget.or(problem.defaults.budget).unwrap_or(DEFAULT_BUDGET);
            let scan = nondegeneracy_scan(&problem.f, budget, seed)?;
            let code = if scan.is_degenerate() { EXIT_FAIL } else { EXIT_OK };
            Ok(("nondegen", json!({ "budget": budget, "seed": seed }), scan_json(&scan), Some(seed), code, None))
        }
        Command::Check { common, region, kind, point, tol, resolution, csv } => {
            let problem = load(common)?;
            let kind: CheckKind = kind.parse()?;
            let reg = region_arg(region, &problem)?;
            let samples = region.samples.or(problem.defaults.samples).unwrap_or(DEFAULT_SAMPLES);
            let seed = common.seed.or(problem.defaults.seed).unwrap_or(DEFAULT_SEED);
            let mut cfg = CheckConfig::new(kind, reg, samples, seed);
            if kind.needs_reference() {
                cfg.reference = Some(point_arg(point, &problem, "--point")?);
            }
            if let Some(t) = common.cluster_tol.or(problem.defaults.cluster_tol) {
                cfg.cluster_tol = t;
            }
            if let Some(t) = tol.or(problem.defaults.tol) {
                cfg.feas_tol = t;
            }
            if let Some(h) = resolution {
                cfg.resolution = *h;
            }
            let problems = Problems { f: &problem.f, g: problem.g.as_ref(), h: problem.h.as_ref() };
            let report = run_inequality_check(problems, &cfg, None)?;
            let code = match report.verdict {
                Verdict::Pass => EXIT_OK,
                Verdict::Fail => EXIT_FAIL,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            };
            let side = csv.as_ref().map(|p| (p.clone(), check_csv(&report, problem.n)));
            let config = serde_json::to_value(&cfg).expect("configs serialize");
            let results = serde_json::to_value(&report).expect("reports serialize");
            Ok(("check", config, results, Some(seed), code, side))
        }
        Command::ExponentFit { common, region, point } => {
            let problem = load(common)?;
            let reg = region_arg(region, &problem)?;
            let x = point_arg(point, &problem, "--point")?;
            let samples = region.samples.or(problem.defaults.samples).unwrap_or(DEFAULT_SAMPLES);
            let seed = common.seed.or(problem.defaults.seed).unwrap_or(DEFAULT_SEED);
            let config = json!({ "region": reg.describe(), "point": x, "samples": samples, "seed": seed });
            match empirical_exponent(&problem.f, &x, &reg, samples, seed) {
                Ok(fit) => {
                    let (n, p, d) = problem_dims(&problem);
                    let c = certificate(CertificateKind::GradientLocal, n, p, d, None)?;
                    let results = json!({ "fit": fit, "certified": cert_json(&c) });
                    Ok(("exponent-fit", config, results, Some(seed), EXIT_OK, None))
                }
                Err(Error::Inconclusive(msg)) => {
                    Ok(("exponent-fit", config, json!({ "verdict": "INCONCLUSIVE", "diagnostic": msg }), Some(seed), EXIT_INCONCLUSIVE, None))
                }
                Err(e) => Err(e),
            }
        }
        Command::Flow { common, point, tol, max_iter, step } => {
            let problem = load(common)?;
            let x0 = point_arg(point, &problem, "--point")?;
            let tol = tol.or(problem.defaults.tol).unwrap_or(DEFAULT_FLOW_TOL);
            let max_iter = max_iter.unwrap_or(DEFAULT_MAX_ITER);
            let policy = match step.as_str() {
                "polyak" => StepPolicy::Polyak,
                "unit" => StepPolicy::Unit,
                other => return Err(usage(format!("--step must be polyak or unit, got '{other}'"))),
            };
            let traj = solve_feasibility_flow_with(&problem.f, &x0, tol, policy, max_iter)?;
            let (n, p, d) = problem_dims(&problem);
            let cert = certificate(CertificateKind::ErrorBoundLocal, n, p, d, None)?;
            // The length bound scales with f₊(x₀)^{1/R}.
            let log_ratio = traj.log_length_ratio(|l| cert.scale_log(l));
            let code = match traj.termination {
                Termination::Success => EXIT_OK,
                Termination::Stalled => EXIT_FAIL,
                Termination::MaxIter => EXIT_INCONCLUSIVE,
            };
            let results = json!({
                "trajectory": traj,
                "termination": traj.termination.label(),
                "final_point": traj.final_point(),
                "length_comparison": {
                    "certificate": cert_json(&cert),
                    "log_length_over_bound": log_ratio,
                },
            });
            let config = json!({ "point": x0, "tol": tol, "max_iter": max_iter, "step": step });
            Ok(("flow", config, results, None, code, None))
        }
    }
}
