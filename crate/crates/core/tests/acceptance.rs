//! Acceptance suite. Prints one line per criterion and exits non-zero if any fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{bloch, poly, random_matrix, random_point, rat, var};
use eigbound::exponent::{certificate, r_function, CertificateKind};
use eigbound::harness::{
    empirical_exponent, run_inequality_check, sample_region, solve_feasibility_flow, CheckConfig, CheckKind, Problems, Region,
    Verdict,
};
use eigbound::io::{parse_problem, parse_problem_str, report_payload};
use eigbound::linalg::{jacobi_eigen, norm};
use eigbound::newton::{is_convenient, minkowski_sum, support_value_and_face, NewtonPolyhedron};
use eigbound::nondegen::{gamma_of_matrix, nondegeneracy_scan, principal_matrix, scalar_scan, witness_search_at_point, FaceVerdict};
use eigbound::polynomial::{f64_to_rational, Polynomial, Rational};
use eigbound::spectral::{SubdiffModel, DEFAULT_CLUSTER_TOL};
use eigbound::SymPolyMatrix;
use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn unit_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, n);
        let r = norm(&v);
        if r > 1e-8 {
            return v.iter().map(|c| c / r).collect();
        }
    }
}

fn dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let g = Gamma::new(1.0, 1.0).unwrap();
    let w: Vec<f64> = (0..k).map(|_| g.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn random_orthogonal(rng: &mut ChaCha8Rng, p: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(p, p, |_, _| StandardNormal.sample(rng));
    a.qr().q()
}

/// Adds a constant matrix to `f` so that `F(x0)` has a top eigenvalue of
/// multiplicity exactly `m` and a spectral gap of 0.5 below it.
fn force_multiplicity(rng: &mut ChaCha8Rng, f: &SymPolyMatrix, x0: &[f64], m: usize) -> SymPolyMatrix {
    let p = f.p();
    let q = random_orthogonal(rng, p);
    let top: f64 = rng.gen_range(-1.0..1.0);
    let mut d = vec![top; p];
    for (k, v) in d.iter_mut().enumerate().skip(m) {
        *v = top - 0.5 - 0.25 * k as f64;
    }
    let target = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) * q.transpose();
    let fx = f.eval_matrix(x0).unwrap();
    f.map_entries(|i, j, e| {
        let shift = 0.5 * (target[(i, j)] + target[(j, i)]) - fx[(i, j)];
        let c = Polynomial::constant(f.n(), f64_to_rational(shift)?);
        Ok::<_, eigbound::Error>(e + &c)
    })
    .unwrap()
}

fn image_norm(model: &SubdiffModel, w: &DMatrix<f64>) -> f64 {
    let m = w.nrows();
    let mut sq = 0.0;
    for a in &model.generators {
        let mut t = 0.0;
        for i in 0..m {
            for j in 0..m {
                t += a[(i, j)] * w[(i, j)];
            }
        }
        sq += t * t;
    }
    sq.sqrt()
}

fn image(model: &SubdiffModel, w: &DMatrix<f64>) -> Vec<f64> {
    model.generators.iter().map(|a| a.component_mul(w).sum()).collect()
}

/// Residual `g(LLᵀ/‖L‖²)` and its Jacobian with respect to the entries of `L`.
fn factor_residual(model: &SubdiffModel, l: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let m = l.nrows();
    let nn = l.norm_squared();
    let g = image(model, &(l * l.transpose() / nn));
    let mut jac = DMatrix::zeros(g.len(), m * m);
    for (s, (a, gs)) in model.generators.iter().zip(&g).enumerate() {
        let d = (a * l - l * *gs) * (2.0 / nn);
        for (k, v) in d.iter().enumerate() {
            jac[(s, k)] = *v;
        }
    }
    (g, jac)
}

/// Levenberg–Marquardt on `g(W)` with `W = LLᵀ/‖L‖²`, started near `w0`.
fn polish(model: &SubdiffModel, w0: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> f64 {
    let m = w0.nrows();
    let e = jacobi_eigen(w0).unwrap();
    let mut l = DMatrix::from_fn(m, m, |i, j| e.vectors[(i, j)] * e.values[j].max(0.0).sqrt() + 1e-3 * gaussian_vec(rng, 1)[0]);
    l /= l.norm();
    let (mut r, mut jac) = factor_residual(model, &l);
    let mut cost = norm(&r);
    let mut damping = 1e-3;
    for _ in 0..2_000 {
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let rhs = -(&jt * nalgebra::DVector::from_column_slice(&r));
        let mut accepted = false;
        for _ in 0..40 {
            let mut a = jtj.clone();
            for d in 0..a.nrows() {
                a[(d, d)] += damping * (1.0 + jtj[(d, d)]);
            }
            let Some(step) = a.lu().solve(&rhs) else {
                damping *= 10.0;
                continue;
            };
            let mut cand = l.clone();
            for (c, v) in cand.iter_mut().zip(step.iter()) {
                *c += v;
            }
            cand /= cand.norm();
            let (r2, j2) = factor_residual(model, &cand);
            let c2 = norm(&r2);
            if c2 < cost {
                l = cand;
                r = r2;
                jac = j2;
                cost = c2;
                damping = (damping / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            damping *= 4.0;
        }
        if !accepted || cost < 1e-14 {
            break;
        }
    }
    cost
}

fn brute_force_slope(model: &SubdiffModel, rng: &mut ChaCha8Rng) -> f64 {
    let m = model.multiplicity();
    let mut ranked: Vec<(f64, DMatrix<f64>)> = Vec::with_capacity(20_000);
    for _ in 0..10_000 {
        let u = unit_vec(rng, m);
        let w = DMatrix::from_fn(m, m, |i, j| u[i] * u[j]);
        ranked.push((image_norm(model, &w), w));
    }
    for _ in 0..10_000 {
        let k = m + 1;
        let mu = dirichlet(rng, k);
        let mut w = DMatrix::zeros(m, m);
        for weight in mu {
            let u = unit_vec(rng, m);
            w += DMatrix::from_fn(m, m, |i, j| u[i] * u[j]) * weight;
        }
        ranked.push((image_norm(model, &w), w));
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = ranked[0].0;
    for (_, w) in ranked.iter().take(5) {
        best = best.min(polish(model, w, rng));
    }
    best
}

fn criterion_1() -> Outcome {
    for n in 1..=10 {
        let r = r_function(n, 1).map_err(fail)?;
        ensure(r == BigUint::from(1u32), || format!("r({n}, 1) = {r}"))?;
    }
    let r22 = r_function(2, 2).map_err(fail)?;
    ensure(r22 == BigUint::from(6u32), || format!("r(2, 2) = {r22}"))?;
    let r44 = r_function(4, 4).map_err(fail)?;
    ensure(r44 == BigUint::from(2916u32), || format!("r(4, 4) = {r44}"))?;
    let cert = certificate(CertificateKind::GradientLocal, 1, 1, 1, None).map_err(fail)?;
    ensure(cert.theta == rat(2915, 2916), || format!("gradient-local theta = {}", cert.theta))?;
    Ok(format!("r(4,4) = {r44}, gradient-local theta = {}", cert.theta))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_abs: f64 = 0.0;
    let mut instances = 0;
    while instances < 50 {
        let n = rng.gen_range(1..=3);
        let p = rng.gen_range(2..=3);
        let base = random_matrix(&mut rng, n, p, 3);
        let x0 = random_point(&mut rng, n, 1.0);
        let m = rng.gen_range(2..=p);
        let f = force_multiplicity(&mut rng, &base, &x0, m);
        let model = f.subdiff_model(&x0, DEFAULT_CLUSTER_TOL).map_err(fail)?;
        ensure(model.multiplicity() == m, || format!("forced multiplicity {m} came out as {}", model.multiplicity()))?;
        let fw = model.clarke_slope();
        let brute = brute_force_slope(&model, &mut rng);
        let diff = (fw.slope - brute).abs();
        ensure(diff <= 1e-4, || {
            format!("instance {instances}: clarke slope {} vs brute force {brute} (m = {m}, n = {n}, gap {}, converged {})", fw.slope, fw.gap, fw.converged)
        })?;
        worst_abs = worst_abs.max(diff);
        instances += 1;
    }

    let mut worst_rel: f64 = 0.0;
    let mut points = 0;
    let mut attempts = 0;
    let h = 1e-5;
    while points < 50 {
        attempts += 1;
        ensure(attempts < 10_000, || "could not find enough simple-eigenvalue points".into())?;
        let n = rng.gen_range(1..=3);
        let p = rng.gen_range(1..=3);
        let f = random_matrix(&mut rng, n, p, 3);
        let x = random_point(&mut rng, n, 1.0);
        let spectrum = jacobi_eigen(&f.eval_matrix(&x).map_err(fail)?).map_err(fail)?.values;
        if p > 1 && spectrum[0] - spectrum[1] < 0.1 {
            continue;
        }
        let mut grad = vec![0.0; n];
        for s in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[s] += h;
            xm[s] -= h;
            grad[s] = (f.f(&xp).map_err(fail)? - f.f(&xm).map_err(fail)?) / (2.0 * h);
        }
        let fd = norm(&grad);
        if fd < 1e-2 {
            continue;
        }
        let slope = f.slope(&x).map_err(fail)?;
        let rel = (slope - fd).abs() / fd;
        ensure(rel <= 1e-5, || format!("simple point {points}: slope {slope} vs finite difference {fd}"))?;
        worst_rel = worst_rel.max(rel);
        points += 1;
    }
    Ok(format!("max |slope - brute force| = {worst_abs:.2e}, max relative FD error = {worst_rel:.2e}"))
}

fn criterion_3() -> Outcome {
    let f = bloch();
    let model = f.subdiff_model(&[0.0, 0.0], DEFAULT_CLUSTER_TOL).map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = gaussian_vec(&mut rng, 2);
        let dd = model.directional_derivative(&d).map_err(fail)?;
        worst = worst.max((dd - norm(&d)).abs());
    }
    ensure(worst <= 1e-8, || format!("directional derivative off by {worst}"))?;
    let at_zero = model.clarke_slope().slope;
    ensure(at_zero <= 1e-6, || format!("slope at 0 is {at_zero}"))?;
    let at_34 = f.slope(&[3.0, 4.0]).map_err(fail)?;
    ensure((at_34 - 1.0).abs() <= 1e-8, || format!("slope at (3,4) is {at_34}"))?;
    Ok(format!("max ddir error {worst:.2e}, slope(0) = {at_zero:.2e}, slope(3,4) = {at_34}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = rng.gen_range(1..=3);
        let forced = trial % 2 == 0;
        let p = if forced { rng.gen_range(2..=3) } else { rng.gen_range(1..=3) };
        let mut f = random_matrix(&mut rng, n, p, 3);
        let x = random_point(&mut rng, n, 1.0);
        let mut m = 1;
        if forced {
            m = rng.gen_range(2..=p);
            f = force_multiplicity(&mut rng, &f, &x, m);
        }
        let eig = jacobi_eigen(&f.eval_matrix(&x).map_err(fail)?).map_err(fail)?;
        let r = rng.gen_range(1..=n + 1);
        let vectors: Vec<Vec<f64>> = (0..r)
            .map(|_| {
                let u = unit_vec(&mut rng, m);
                let v: Vec<f64> = (0..p).map(|i| (0..m).map(|k| eig.vectors[(i, k)] * u[k]).sum()).collect();
                let nv = norm(&v);
                v.iter().map(|c| c / nv).collect()
            })
            .collect();
        let mu = dirichlet(&mut rng, r);
        let probe = f.g_r_probe(&x, &mu[..r - 1], &vectors).map_err(fail)?;
        let resid = probe
            .identity_residual
            .ok_or_else(|| format!("trial {trial}: vectors were not recognised as top eigenvectors"))?;
        ensure(resid <= 1e-9, || format!("trial {trial}: identity residual {resid}"))?;
        worst = worst.max(resid);
    }
    Ok(format!("max identity residual {worst:.2e}"))
}

fn polytope_corpus() -> Vec<Polynomial> {
    vec![
        poly(2, &[(&[2, 0], 1), (&[0, 2], 1)]),
        poly(2, &[(&[2, 0], 1), (&[0, 2], 1), (&[0, 0], -1)]),
        poly(2, &[(&[1, 1], 1)]),
        poly(2, &[(&[3, 0], 1), (&[1, 2], -2), (&[0, 1], 1)]),
        poly(2, &[(&[4, 0], 1), (&[2, 2], 3), (&[0, 4], 1), (&[1, 0], 1)]),
        poly(2, &[(&[2, 1], 1), (&[0, 3], 1)]),
        poly(3, &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]),
        poly(3, &[(&[1, 1, 1], 1), (&[3, 0, 0], 1)]),
        poly(3, &[(&[1, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 3], 1), (&[1, 1, 1], 2)]),
        poly(3, &[(&[2, 2, 0], 1), (&[0, 1, 1], 1), (&[0, 0, 4], -1)]),
    ]
}

fn random_normal(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))).collect()
}

fn criterion_5() -> Outcome {
    let corpus: Vec<NewtonPolyhedron> = polytope_corpus().iter().map(NewtonPolyhedron::of_polynomial).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut three_way = 0;
    for _ in 0..100 {
        for dim in [2usize, 3] {
            let q = random_normal(&mut rng, dim);
            let members: Vec<&NewtonPolyhedron> = corpus.iter().filter(|g| g.n() == dim).collect();
            for (a, b) in members.iter().zip(members.iter().skip(1)) {
                let sum = minkowski_sum(&[a, b]).map_err(fail)?;
                let lhs = sum.support_value(&q).map_err(fail)?;
                let rhs = a.support_value(&q).map_err(fail)? + b.support_value(&q).map_err(fail)?;
                ensure(lhs == rhs, || format!("d additivity fails at q = {q:?}: {lhs} vs {rhs}"))?;
            }
            for g in members.iter().filter(|g| is_convenient(g)) {
                let face = support_value_and_face(g, &q).map_err(fail)?;
                let negative_d = face.support_value < Rational::zero();
                let negative_q = q.iter().any(|c| *c < Rational::zero());
                ensure(face.at_infinity == negative_d && negative_d == negative_q, || {
                    format!("three-way equivalence fails at q = {q:?}: at_infinity {}, d {}", face.at_infinity, face.support_value)
                })?;
                three_way += 1;
            }
        }
    }

    let labelled: Vec<(Polynomial, bool)> = vec![
        (poly(2, &[(&[2, 0], 1), (&[0, 2], 1)]), true),
        (poly(2, &[(&[2, 0], 1), (&[0, 2], 1), (&[0, 0], -1)]), true),
        (poly(2, &[(&[2, 0], 1), (&[1, 1], -2), (&[0, 2], 1)]), true),
        (poly(2, &[(&[1, 1], 1)]), false),
        (poly(2, &[(&[2, 0], 1), (&[1, 1], 1)]), false),
        (poly(2, &[(&[1, 0], 1), (&[0, 0], 1)]), false),
        (poly(2, &[(&[4, 0], 1), (&[2, 2], 1), (&[0, 4], 1)]), true),
        (poly(1, &[(&[1], 1)]), true),
        (poly(1, &[(&[0], 1)]), false),
        (poly(2, &[(&[2, 2], 1), (&[1, 0], 1), (&[0, 1], 1)]), true),
        (poly(3, &[(&[3, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 1], 1)]), true),
        (poly(3, &[(&[2, 0, 0], 1), (&[0, 2, 0], 1)]), false),
    ];
    for (k, (f, label)) in labelled.iter().enumerate() {
        let got = is_convenient(&NewtonPolyhedron::of_polynomial(f));
        ensure(got == *label, || format!("convenience label {k} ({f}): expected {label}, got {got}"))?;
    }
    Ok(format!("{three_way} three-way checks, {} convenience labels", labelled.len()))
}

fn recheck_scalar_witness(f: &Polynomial, scan_face: &eigbound::Face, x: &[f64], omega: f64) -> Result<f64, String> {
    let part = f.principal_part(scan_face).map_err(fail)?;
    let mut worst = (omega * part.eval(x).map_err(fail)?).abs();
    for g in part.grad(x).map_err(fail)? {
        worst = worst.max((omega * g).abs());
    }
    Ok(worst)
}

fn diagonal_cases() -> Vec<(&'static str, Vec<Polynomial>)> {
    let x = var(2, 0);
    let y = var(2, 1);
    let one = Polynomial::constant(2, rat(1, 1));
    let two = Polynomial::constant(2, rat(2, 1));
    let sq = |p: &Polynomial| p * p;
    let rr = &sq(&x) + &sq(&y);
    let diff = &x - &y;
    let t = var(1, 0);
    vec![
        ("[x^2+y^2]", vec![rr.clone()]),
        ("[(x-y)^2]", vec![sq(&diff)]),
        ("diag(x^2+1, y^2+1)", vec![&sq(&x) + &one, &sq(&y) + &one]),
        ("diag((x-y)^2, x^2+y^2)", vec![sq(&diff), rr.clone()]),
        ("diag(x^2+y^2, x^2+y^2)", vec![rr.clone(), rr.clone()]),
        ("diag(x^2+y^2+1, (x-y)^2+1)", vec![&rr + &one, &sq(&diff) + &one]),
        ("diag(t^2-1, t^4+t)", vec![poly(1, &[(&[2], 1), (&[0], -1)]), poly(1, &[(&[4], 1), (&[1], 1)])]),
        ("diag(t^3, t^2+1)", vec![&sq(&t) * &t, poly(1, &[(&[2], 1), (&[0], 1)])]),
        ("diag((x^2-y^2)^2, x^4+y^4+1)", vec![sq(&(&sq(&x) - &sq(&y))), &(&sq(&sq(&x)) + &sq(&sq(&y))) + &one]),
        ("diag(x^2+y^2+1, x^2+y^2+2)", vec![&rr + &one, &rr + &two]),
    ]
}

fn criterion_6() -> Outcome {
    let diff_sq = poly(2, &[(&[2, 0], 1), (&[1, 1], -2), (&[0, 2], 1)]);
    let report = nondegeneracy_scan(&SymPolyMatrix::scalar(diff_sq.clone()), 500, 0).map_err(fail)?;
    ensure(report.is_degenerate(), || "(x-y)^2 was not found degenerate".into())?;
    let witness = report
        .faces
        .iter()
        .find_map(|s| match &s.verdict {
            FaceVerdict::Degenerate(w) => Some(w.clone()),
            _ => None,
        })
        .unwrap();
    let recheck = recheck_scalar_witness(&diff_sq, &witness.face, &witness.x, witness.omega[(0, 0)])?;
    ensure(recheck <= 1e-9, || format!("(x-y)^2 witness residual {recheck} on recomputation"))?;
    ensure((witness.omega[(0, 0)] - 1.0).abs() <= 1e-9, || "scalar witness omega is not 1".into())?;

    let sum_sq = poly(2, &[(&[2, 0], 1), (&[0, 2], 1)]);
    let report = nondegeneracy_scan(&SymPolyMatrix::scalar(sum_sq), 500, 0).map_err(fail)?;
    ensure(report.verdict_label() == "NO-WITNESS-FOUND", || "x^2+y^2 reported a witness".into())?;

    let b = bloch();
    let gamma = gamma_of_matrix(&b).map_err(fail)?;
    let face = support_value_and_face(&gamma, &[rat(-1, 1), rat(-1, 1)]).map_err(fail)?;
    let fm = principal_matrix(&b, &face).map_err(fail)?;
    let w = witness_search_at_point(&fm, &[1.0, 1.0]).map_err(fail)?.ok_or_else(|| "no Bloch witness at (1,1)".to_string())?;
    let dev = (&w.omega - DMatrix::identity(2, 2) * 0.5).amax();
    ensure(dev <= 1e-9, || format!("Bloch witness deviates from I/2 by {dev}"))?;

    let cases = diagonal_cases();
    for (label, diag) in &cases {
        let scalar_hit = diag
            .iter()
            .map(|e| scalar_scan(e, 500, 0).map(|faces| faces.iter().any(|(_, hit)| hit.is_some())))
            .collect::<eigbound::Result<Vec<bool>>>()
            .map_err(fail)?
            .into_iter()
            .any(|h| h);
        let matrix = SymPolyMatrix::diagonal(diag.clone()).map_err(fail)?;
        let matrix_hit = nondegeneracy_scan(&matrix, 500, 0).map_err(fail)?.is_degenerate();
        ensure(scalar_hit == matrix_hit, || format!("{label}: scalar degenerate {scalar_hit}, matrix degenerate {matrix_hit}"))?;
    }
    Ok(format!("witness residual {recheck:.2e}, Bloch omega deviation {dev:.2e}, {} diagonal cases agree", cases.len()))
}

fn criterion_7() -> Outcome {
    let linear = SymPolyMatrix::scalar(var(1, 0));
    let config = CheckConfig::new(CheckKind::ErrorBoundLocal, Region::cube(1, -1.0, 1.0), 1000, 0).with_resolution(1e-3);
    let eb = run_inequality_check(Problems::single(&linear), &config, None).map_err(fail)?;
    let c = eb.c_estimate.ok_or("error bound produced no estimate")?;
    ensure((0.9..=1.1).contains(&c), || format!("error-bound c = {c}"))?;

    let square = SymPolyMatrix::scalar(poly(1, &[(&[2], 1)]));
    let ball = Region::Ball { center: vec![0.0], radius: 0.5 };
    let config = CheckConfig::new(CheckKind::GradientLocal, ball.clone(), 1000, 0).with_reference(vec![0.0]);
    let gl = run_inequality_check(Problems::single(&square), &config, None).map_err(fail)?;
    let cg = gl.c_estimate.ok_or("gradient check produced no estimate")?;
    ensure(gl.verdict == Verdict::Pass && cg > 0.0, || format!("gradient-local verdict {:?}, c = {cg}", gl.verdict))?;

    let fit = empirical_exponent(&square, &[0.0], &ball, 1000, 0).map_err(fail)?;
    ensure((fit.theta_hat - 0.5).abs() <= 0.05, || format!("fitted exponent {}", fit.theta_hat))?;
    Ok(format!("error-bound c = {c:.4}, gradient-local c = {cg:.4}, fitted exponent {:.4}", fit.theta_hat))
}

fn criterion_8() -> Outcome {
    let cases = [
        ("[x]", SymPolyMatrix::scalar(var(1, 0)), 1.0),
        ("diag(x, -x)", SymPolyMatrix::diagonal(vec![var(1, 0), -&var(1, 0)]).unwrap(), 0.7),
    ];
    let mut lengths = Vec::new();
    for (label, f, start) in &cases {
        let traj = solve_feasibility_flow(f, &[*start], 1e-9, 1000).map_err(fail)?;
        for pair in traj.iterates.windows(2) {
            ensure(pair[1].f_plus <= pair[0].f_plus, || format!("{label}: f_plus increased"))?;
        }
        let last = f.f(traj.final_point()).map_err(fail)?;
        ensure(last <= 1e-6, || format!("{label}: terminal f = {last}"))?;
        let rel = (traj.total_length - start).abs() / start;
        ensure(rel <= 0.02, || format!("{label}: length {} vs {start}", traj.total_length))?;
        lengths.push(traj.total_length);
    }
    Ok(format!("lengths {:.6} and {:.6}", lengths[0], lengths[1]))
}

fn criterion_9() -> Outcome {
    let disk = SymPolyMatrix::scalar(poly(2, &[(&[2, 0], 1), (&[0, 2], 1), (&[0, 0], -1)]));
    ensure(is_convenient(&gamma_of_matrix(&disk).map_err(fail)?), || "disk polynomial is not convenient".into())?;
    ensure(!nondegeneracy_scan(&disk, 500, 0).map_err(fail)?.is_degenerate(), || "disk polynomial reported degenerate".into())?;
    let mut mins = Vec::new();
    for (k, r) in [4.0, 8.0, 16.0, 32.0].into_iter().enumerate() {
        let shell = Region::Shell { n: 2, inner: r, outer: 2.0 * r };
        let cloud = sample_region(&shell, 2000, 9 + k as u64).map_err(fail)?;
        let mut min = f64::INFINITY;
        for x in &cloud.points {
            min = min.min(disk.slope(x).map_err(fail)?);
        }
        if let Some(prev) = mins.last() {
            ensure(min >= 0.5 * prev, || format!("min slope {min} on shell [{r}, {}] below half of {prev}", 2.0 * r))?;
        }
        mins.push(min);
    }
    Ok(format!("shell minima {mins:.3?}"))
}

fn problems_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems")
}

fn run_cli(args: &[&str], report: &Path) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_eigbound"))
        .args(args)
        .arg("--report")
        .arg(report)
        .output()
        .map_err(fail)?;
    ensure(out.status.code().is_some(), || format!("{args:?} was killed"))?;
    let text = std::fs::read_to_string(report).map_err(fail)?;
    report_payload(&text).map_err(fail)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(fail)?;
    let problems = problems_dir();
    let p = |name: &str| problems.join(name).to_string_lossy().into_owned();
    let invocations: Vec<Vec<String>> = vec![
        vec!["check".into(), "--problem".into(), p("linear.json"), "--kind".into(), "error-bound-local".into(), "--seed".into(), "3".into()],
        vec!["nondegen".into(), "--problem".into(), p("diff_square.json"), "--seed".into(), "5".into()],
        vec!["flow".into(), "--problem".into(), p("kink.json"), "--point".into(), "0.7".into()],
    ];
    for (k, args) in invocations.iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run_cli(&args, &dir.path().join(format!("a{k}.json")))?;
        let second = run_cli(&args, &dir.path().join(format!("b{k}.json")))?;
        ensure(first == second, || format!("{} payloads differ between runs", args[0]))?;
    }

    let mut files = 0;
    for entry in std::fs::read_dir(&problems).map_err(fail)? {
        let path = entry.map_err(fail)?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let problem = parse_problem(&path).map_err(fail)?;
        let text = problem.to_json();
        let again = parse_problem_str(&text).map_err(fail)?;
        ensure(again == problem, || format!("{} does not round-trip", path.display()))?;
        ensure(again.to_json() == text, || format!("{} serialization is not stable", path.display()))?;
        files += 1;
    }
    Ok(format!("{} commands deterministic, {files} problem files round-trip", invocations.len()))
}

fn main() {
    let criteria: [(fn() -> Outcome, Duration); 10] = [
        (criterion_1, Duration::from_secs(1)),
        (criterion_2, Duration::from_secs(120)),
        (criterion_3, Duration::from_secs(1)),
        (criterion_4, Duration::from_secs(30)),
        (criterion_5, Duration::from_secs(10)),
        (criterion_6, Duration::from_secs(60)),
        (criterion_7, Duration::from_secs(60)),
        (criterion_8, Duration::from_secs(10)),
        (criterion_9, Duration::from_secs(60)),
        (criterion_10, Duration::from_secs(10)),
    ];
    let mut failures = 0;
    for (k, (run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS ({elapsed:.2?}) {detail}", k + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL ({elapsed:.2?}) {why}", k + 1);
            }
        }
    }
    if failures > 0 {
        println!("{failures} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
