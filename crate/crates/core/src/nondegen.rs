//! Non-degeneracy at infinity of a symmetric polynomial matrix.
//!
//! `F` is degenerate on a face `Δ` of `Γ_∞(F)` when some symmetric `Ω` with
//! `ω_ii ≥ 0`, `tr Ω = 1` satisfies `tr(Ω ∂_k F_Δ(x)) = 0` for every `k` and
//! `tr(Ω F_Δ(x)) = 0` at a point `x` of the open torus `(ℝ∖{0})ⁿ`. The scan
//! below searches for such witnesses; it can certify degeneracy but never
//! non-degeneracy.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, input, Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::newton::{
    decompose_face, enumerate_faces_at_infinity, is_convenient, minkowski_sum, polyhedron_contains,
    support_value_and_face, Face, FaceDecomposition, NewtonPolyhedron,
};
use crate::polynomial::{f64_to_rational, rational_to_f64, Polynomial, Rational};
use crate::spectral::SymPolyMatrix;

/// Absolute tolerance of the re-verified witness invariants.
pub const WITNESS_TOL: f64 = 1e-9;
/// Magnitude range of torus samples, `10^[-2, 2]`.
pub const SAMPLE_LOG10_RANGE: (f64, f64) = (-2.0, 2.0);

const REFINE_MAX_ITER: usize = 200;
const REFINE_MAG_BOUNDS: (f64, f64) = (1e-6, 1e6);
const SCAN_CHUNK: usize = 32;

/// `Γ(F) = Σ_{i,j} Γ(f_ij)` over all `p²` entries; entries with empty
/// polyhedra (zero polynomials) are skipped.
pub fn gamma_of_matrix(f: &SymPolyMatrix) -> Result<NewtonPolyhedron> {
    let polys = entry_polyhedra(f);
    let refs: Vec<&NewtonPolyhedron> = polys.iter().filter(|(_, _, g)| !g.is_empty()).map(|(_, _, g)| g).collect();
    if refs.is_empty() {
        return Ok(NewtonPolyhedron::empty(f.n()));
    }
    minkowski_sum(&refs)
}

/// `(i, j, Γ(f_ij))` for every ordered pair, row-major.
fn entry_polyhedra(f: &SymPolyMatrix) -> Vec<(usize, usize, NewtonPolyhedron)> {
    let p = f.p();
    let upper: Vec<NewtonPolyhedron> = f.upper_entries().map(|(_, _, e)| NewtonPolyhedron::of_polynomial(e)).collect();
    let idx = |i: usize, j: usize| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * p - a * (a + 1) / 2 + b
    };
    let mut out = Vec::with_capacity(p * p);
    for i in 0..p {
        for j in 0..p {
            out.push((i, j, upper[idx(i, j)].clone()));
        }
    }
    out
}

/// The principal-part matrix `F_Δ` of a face of `Γ(F)`.
#[derive(Clone, Debug)]
pub struct FaceMatrix {
    pub face: Face,
    /// Parts `Δ_ij` for the nonempty entries, in row-major `(i, j)` order.
    pub decomposition: FaceDecomposition,
    /// The `(i, j)` labels of `decomposition.parts`.
    pub part_labels: Vec<(usize, usize)>,
    pub matrix: SymPolyMatrix,
}

pub fn principal_matrix(f: &SymPolyMatrix, face: &Face) -> Result<FaceMatrix> {
    check_dim(f.n(), face.witness_q.len(), "face witness")?;
    let polys = entry_polyhedra(f);
    let nonempty: Vec<&(usize, usize, NewtonPolyhedron)> = polys.iter().filter(|(_, _, g)| !g.is_empty()).collect();
    if nonempty.is_empty() {
        return input("principal_matrix: the zero matrix has no faces");
    }
    let refs: Vec<&NewtonPolyhedron> = nonempty.iter().map(|(_, _, g)| g).collect();
    let decomposition = decompose_face(face, &refs)?;
    let total: Rational = decomposition.parts.iter().map(|d| d.support_value.clone()).sum();
    if total != face.support_value {
        return input("principal_matrix: support value does not match the face normal");
    }
    let part_labels = nonempty.iter().map(|(i, j, _)| (*i, *j)).collect();
    let matrix = f.map_entries(|_, _, e| {
        if e.is_zero() {
            return Ok(e.clone());
        }
        let gamma = NewtonPolyhedron::of_polynomial(e);
        let part = support_value_and_face(&gamma, &face.witness_q)?;
        e.principal_part(&part)
    })?;
    Ok(FaceMatrix { face: face.clone(), decomposition, part_labels, matrix })
}

/// A point of the open torus and a density-like `Ω` violating the
/// non-degeneracy implication on a face.
#[derive(Clone, Debug)]
pub struct DegeneracyWitness {
    pub face: Face,
    pub x: Vec<f64>,
    pub omega: DMatrix<f64>,
    /// Re-verified `|tr(Ω ∂_k F_Δ(x))|` for each `k`, then `|tr(Ω F_Δ(x))|`, each
    /// divided by `Σ |Ω_ij| |∂_k F_Δ|_ij(|x|)`, the magnitude of the summed terms.
    pub residuals: Vec<f64>,
    /// `|tr Ω − 1|`.
    pub trace_residual: f64,
}

/// Number of unknowns of `Ω`: `p` diagonal entries followed by the strict upper triangle.
fn omega_len(p: usize) -> usize {
    p * (p + 1) / 2
}

fn omega_from_vec(p: usize, w: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p, p);
    for i in 0..p {
        m[(i, i)] = w[i];
    }
    let mut k = p;
    for i in 0..p {
        for j in (i + 1)..p {
            m[(i, j)] = w[k];
            m[(j, i)] = w[k];
            k += 1;
        }
    }
    m
}

/// Coefficients of `tr(Ω M)` in the layout of [`omega_len`].
fn trace_row(m: &DMatrix<f64>) -> Vec<f64> {
    let p = m.nrows();
    let mut row: Vec<f64> = (0..p).map(|i| m[(i, i)]).collect();
    for i in 0..p {
        for j in (i + 1)..p {
            row.push(2.0 * m[(i, j)]);
        }
    }
    row
}

fn abs_poly(e: &Polynomial) -> Polynomial {
    Polynomial::from_terms(e.n(), e.terms().map(|(k, c)| (k.entries().to_vec(), c.abs()))).expect("same variable count")
}

/// Everything needed to evaluate the witness system of one face quickly.
struct FaceSystem {
    n: usize,
    p: usize,
    value: SymPolyMatrix,
    partials: Vec<SymPolyMatrix>,
    abs_value: SymPolyMatrix,
    abs_partials: Vec<SymPolyMatrix>,
}

struct Rows {
    /// Scaled constraint rows (partials first, then the value row) with their scales.
    rows: Vec<(Vec<f64>, f64)>,
}

impl FaceSystem {
    fn new(fm: &SymPolyMatrix) -> Self {
        let partials: Vec<SymPolyMatrix> = (0..fm.n())
            .map(|k| fm.map_entries::<Error>(|_, _, e| Ok(e.partial(k))).expect("infallible"))
            .collect();
        let abs = |m: &SymPolyMatrix| m.map_entries::<Error>(|_, _, e| Ok(abs_poly(e))).expect("infallible");
        Self {
            n: fm.n(),
            p: fm.p(),
            abs_value: abs(fm),
            abs_partials: partials.iter().map(abs).collect(),
            value: fm.clone(),
            partials,
        }
    }

    /// Magnitude of the largest absolute term sum among the entries; rows are
    /// divided by it so the LP tolerance is relative to the terms involved.
    fn scale(abs: &SymPolyMatrix, xa: &[f64]) -> f64 {
        abs.eval_matrix(xa).map(|m| m.amax()).unwrap_or(0.0)
    }

    fn rows(&self, x: &[f64]) -> Result<Rows> {
        let xa: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        let mut rows = Vec::with_capacity(self.n + 1);
        let dms = self.value.partial_matrices(x)?;
        for (k, dm) in dms.iter().enumerate() {
            let s = Self::scale(&self.abs_partials[k], &xa);
            if s > 0.0 {
                rows.push((trace_row(dm).iter().map(|c| c / s).collect(), s));
            }
        }
        let vm = self.value.eval_matrix(x)?;
        let s = Self::scale(&self.abs_value, &xa);
        if s > 0.0 {
            rows.push((trace_row(&vm).iter().map(|c| c / s).collect(), s));
        }
        Ok(Rows { rows })
    }

    /// Phase-1 feasibility of the witness LP at `x`.
    fn solve_lp(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        let p = self.p;
        let len = omega_len(p);
        let rows = self.rows(x)?;
        let mut lp = LinearProgram::<f64>::new(len);
        for j in p..len {
            lp.set_free(j);
        }
        let mut tr = vec![0.0; len];
        tr[..p].iter_mut().for_each(|v| *v = 1.0);
        lp.add_constraint(tr, Relation::Eq, 1.0);
        for (row, _) in &rows.rows {
            lp.add_constraint(row.clone(), Relation::Eq, 0.0);
        }
        match lp.solve() {
            Ok(LpOutcome::Infeasible { .. }) => Ok(None),
            Ok(LpOutcome::Optimal { x: w, .. }) => Ok(Some(w)),
            Ok(LpOutcome::Unbounded) => Err(Error::Numeric("witness LP reported unbounded on a zero objective".into())),
            Err(e) => {
                let scales: Vec<String> = rows.rows.iter().map(|(_, s)| format!("{s:.3e}")).collect();
                Err(Error::Numeric(format!("witness LP failed at x = {x:?} (row scales [{}]): {e}", scales.join(", "))))
            }
        }
    }

    /// Scaled residual vector and Jacobian in `(x, ω)` for the refinement.
    fn residual(&self, z: &[f64], scales: &[Option<f64>]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let (n, p) = (self.n, self.p);
        let len = omega_len(p);
        let x = &z[..n];
        let w = &z[n..];
        let omega = omega_from_vec(p, w);
        let dms = self.value.partial_matrices(x)?;
        let vm = self.value.eval_matrix(x)?;
        let mut res = Vec::new();
        let mut jac_rows: Vec<Vec<f64>> = Vec::new();
        for k in 0..n {
            let Some(s) = scales[k] else { continue };
            let row = trace_row(&dms[k]);
            res.push(row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / s);
            let hess = self.partials[k].partial_matrices(x)?;
            let mut jr: Vec<f64> = hess.iter().map(|h| h.component_mul(&omega).sum() / s).collect();
            jr.extend(row.iter().map(|c| c / s));
            jac_rows.push(jr);
        }
        if let Some(s) = scales[n] {
            let row = trace_row(&vm);
            res.push(row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / s);
            let mut jr: Vec<f64> = dms.iter().map(|d| d.component_mul(&omega).sum() / s).collect();
            jr.extend(row.iter().map(|c| c / s));
            jac_rows.push(jr);
        }
        res.push(w[..p].iter().sum::<f64>() - 1.0);
        let mut jr = vec![0.0; n];
        jr.extend((0..len).map(|j| if j < p { 1.0 } else { 0.0 }));
        jac_rows.push(jr);
        let jac = DMatrix::from_fn(jac_rows.len(), n + len, |r, c| jac_rows[r][c]);
        Ok((res, jac))
    }

    fn row_scales(&self, x: &[f64]) -> Vec<Option<f64>> {
        let xa: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        let mut out: Vec<Option<f64>> = self
            .abs_partials
            .iter()
            .map(|m| Some(Self::scale(m, &xa)).filter(|s| *s > 0.0))
            .collect();
        out.push(Some(Self::scale(&self.abs_value, &xa)).filter(|s| *s > 0.0));
        out
    }

    /// Levenberg–Marquardt on the scaled witness residuals, keeping `x` in its
    /// starting orthant and the diagonal of `Ω` nonnegative.
    fn refine(&self, x0: &[f64]) -> Result<Vec<f64>> {
        let (n, p) = (self.n, self.p);
        let signs: Vec<f64> = x0.iter().map(|v| v.signum()).collect();
        let project = |z: &mut [f64]| {
            for k in 0..n {
                let mag = (z[k] * signs[k]).clamp(REFINE_MAG_BOUNDS.0, REFINE_MAG_BOUNDS.1);
                z[k] = signs[k] * mag;
            }
            for i in 0..p {
                z[n + i] = z[n + i].max(0.0);
            }
        };
        let mut z: Vec<f64> = x0.to_vec();
        z.extend((0..omega_len(p)).map(|j| if j < p { 1.0 / p as f64 } else { 0.0 }));
        let cost_at = |z: &[f64]| -> Result<(f64, Vec<f64>, DMatrix<f64>)> {
            let scales = self.row_scales(&z[..n]);
            let (r, j) = self.residual(z, &scales)?;
            Ok((r.iter().map(|v| v * v).sum(), r, j))
        };
        let (mut cost, mut r, mut jac) = cost_at(&z)?;
        let mut mu = 1e-3;
        for _ in 0..REFINE_MAX_ITER {
            if cost < 1e-30 {
                break;
            }
            let jt = jac.transpose();
            let jtj = &jt * &jac;
            let g = &jt * DVector::from_vec(r.clone());
            let mut improved = false;
            for _ in 0..20 {
                let mut a = jtj.clone();
                for d in 0..a.nrows() {
                    a[(d, d)] += mu * (1.0 + jtj[(d, d)]);
                }
                let Some(step) = a.lu().solve(&(-&g)) else {
                    mu *= 10.0;
                    continue;
                };
                let mut cand: Vec<f64> = z.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                project(&mut cand);
                if cand.iter().any(|v| !v.is_finite()) {
                    mu *= 10.0;
                    continue;
                }
                let (c2, r2, j2) = cost_at(&cand)?;
                if c2 < cost {
                    z = cand;
                    cost = c2;
                    r = r2;
                    jac = j2;
                    mu = (mu / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        Ok(z[..n].to_vec())
    }

    /// Exact re-evaluation of every trace at the rounded witness.
    fn verify(&self, face: &Face, x: &[f64], w: &[f64]) -> Result<Option<DegeneracyWitness>> {
        let p = self.p;
        let omega = omega_from_vec(p, w);
        let xr = x.iter().map(|v| f64_to_rational(*v)).collect::<Result<Vec<_>>>()?;
        let mut om = Vec::with_capacity(p * p);
        for i in 0..p {
            for j in 0..p {
                om.push(f64_to_rational(omega[(i, j)])?);
            }
        }
        let xa: Vec<Rational> = xr.iter().map(|v| v.abs()).collect();
        // |tr(Ω M)| relative to Σ |Ω_ij| |M|_ij, the size of the terms it sums.
        let relative_trace = |m: &SymPolyMatrix, abs: &SymPolyMatrix| -> Result<f64> {
            let mut t = Rational::zero();
            let mut size = Rational::zero();
            for i in 0..p {
                for j in 0..p {
                    let e = m.entry(i, j);
                    if !e.is_zero() {
                        t += &om[i * p + j] * e.eval_exact(&xr)?;
                        size += om[i * p + j].abs() * abs.entry(i, j).eval_exact(&xa)?;
                    }
                }
            }
            if t.is_zero() {
                return Ok(0.0);
            }
            Ok(rational_to_f64(&(t.abs() / size)))
        };
        let mut residuals = Vec::with_capacity(self.n + 1);
        for (d, a) in self.partials.iter().zip(&self.abs_partials) {
            residuals.push(relative_trace(d, a)?);
        }
        residuals.push(relative_trace(&self.value, &self.abs_value)?);
        let tr: Rational = (0..p).map(|i| om[i * p + i].clone()).sum();
        let trace_residual = rational_to_f64(&(tr - Rational::from_integer(1.into())).abs());
        let diag_ok = (0..p).all(|i| rational_to_f64(&om[i * p + i]) >= -WITNESS_TOL);
        if diag_ok && trace_residual <= WITNESS_TOL && residuals.iter().all(|r| *r <= WITNESS_TOL) {
            Ok(Some(DegeneracyWitness { face: face.clone(), x: x.to_vec(), omega, residuals, trace_residual }))
        } else {
            Ok(None)
        }
    }
}

/// Solves the witness LP of `fm` at a fixed torus point; a returned witness
/// has been re-verified in exact arithmetic.
pub fn witness_search_at_point(fm: &FaceMatrix, x: &[f64]) -> Result<Option<DegeneracyWitness>> {
    check_dim(fm.matrix.n(), x.len(), "torus point")?;
    if x.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return input("witness_search_at_point: every coordinate must be finite and nonzero");
    }
    let sys = FaceSystem::new(&fm.matrix);
    search_with(&sys, &fm.face, x)
}

fn search_with(sys: &FaceSystem, face: &Face, x: &[f64]) -> Result<Option<DegeneracyWitness>> {
    match sys.solve_lp(x)? {
        Some(w) => sys.verify(face, x, &w),
        None => Ok(None),
    }
}

/// Deterministic torus sample: orthant from the index bits, log-uniform magnitudes.
pub fn torus_sample(n: usize, index: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let orthant = index % (1usize << n.min(62));
    (0..n)
        .map(|k| {
            let mag = 10f64.powf(rng.gen_range(SAMPLE_LOG10_RANGE.0..=SAMPLE_LOG10_RANGE.1));
            if (orthant >> k) & 1 == 1 {
                -mag
            } else {
                mag
            }
        })
        .collect()
}

fn torus_samples(n: usize, budget: usize, seed: u64, face_index: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (face_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..budget).map(|i| torus_sample(n, i, &mut rng)).collect()
}

#[derive(Clone, Debug)]
pub enum FaceVerdict {
    Degenerate(Box<DegeneracyWitness>),
    NoWitnessFound { budget: usize },
}

#[derive(Clone, Debug)]
pub struct FaceScan {
    pub face: Face,
    pub principal: SymPolyMatrix,
    pub verdict: FaceVerdict,
    /// Samples examined before the verdict.
    pub samples_tried: usize,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub faces: Vec<FaceScan>,
    pub budget: usize,
    pub seed: u64,
}

impl ScanReport {
    pub fn is_degenerate(&self) -> bool {
        self.faces.iter().any(|f| matches!(f.verdict, FaceVerdict::Degenerate(_)))
    }

    pub fn verdict_label(&self) -> &'static str {
        if self.is_degenerate() {
            "DEGENERATE"
        } else {
            "NO-WITNESS-FOUND"
        }
    }
}

/// Sampled search for a degeneracy witness on every face of `Γ_∞(F)`.
///
/// Each sample first tries the LP at the sampled point; if that fails, a
/// Levenberg–Marquardt pass moves the point toward the witness variety and the
/// LP is retried there.
pub fn nondegeneracy_scan(f: &SymPolyMatrix, budget: usize, seed: u64) -> Result<ScanReport> {
    if budget == 0 {
        return input("nondegeneracy_scan: budget must be at least 1");
    }
    let gamma = gamma_of_matrix(f)?;
    if gamma.is_empty() {
        return Ok(ScanReport { faces: Vec::new(), budget, seed });
    }
    let faces = enumerate_faces_at_infinity(&gamma)?;
    let mut out = Vec::with_capacity(faces.len());
    for (fi, face) in faces.iter().enumerate() {
        let fm = principal_matrix(f, face)?;
        let sys = FaceSystem::new(&fm.matrix);
        let samples = torus_samples(f.n(), budget, seed, fi);
        let mut verdict = FaceVerdict::NoWitnessFound { budget };
        let mut tried = budget;
        'chunks: for (ci, chunk) in samples.chunks(SCAN_CHUNK).enumerate() {
            let found: Vec<Result<Option<DegeneracyWitness>>> = chunk
                .par_iter()
                .map(|x| {
                    if let Some(w) = search_with(&sys, face, x)? {
                        return Ok(Some(w));
                    }
                    let refined = sys.refine(x)?;
                    search_with(&sys, face, &refined)
                })
                .collect();
            for (k, r) in found.into_iter().enumerate() {
                if let Some(w) = r? {
                    verdict = FaceVerdict::Degenerate(Box::new(w));
                    tried = ci * SCAN_CHUNK + k + 1;
                    break 'chunks;
                }
            }
        }
        out.push(FaceScan { face: face.clone(), principal: fm.matrix, verdict, samples_tried: tried });
    }
    Ok(ScanReport { faces: out, budget, seed })
}

/// Direct check for `p = 1`: `x` is a witness iff `∇f_Δ(x) = 0` and `f_Δ(x) = 0`,
/// each component measured relative to the magnitude of its terms.
pub fn scalar_singular_point(f_delta: &Polynomial, x: &[f64], rel_tol: f64) -> Result<bool> {
    let rel = |p: &Polynomial| -> Result<bool> {
        let s = p.eval_abs(x)?;
        Ok(s == 0.0 || p.eval(x)?.abs() <= rel_tol * s)
    };
    if !rel(f_delta)? {
        return Ok(false);
    }
    for k in 0..f_delta.n() {
        if !rel(&f_delta.partial(k))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Faces of `Γ_∞(f)` on which a sampled singular zero of `f_Δ` in the torus
/// was found, searched with Newton steps on `(∇f_Δ, f_Δ)` in `x` alone.
pub fn scalar_scan(f: &Polynomial, budget: usize, seed: u64) -> Result<Vec<(Face, Option<Vec<f64>>)>> {
    let gamma = NewtonPolyhedron::of_polynomial(f);
    if gamma.is_empty() {
        return Ok(Vec::new());
    }
    let n = f.n();
    let mut out = Vec::new();
    for (fi, face) in enumerate_faces_at_infinity(&gamma)?.into_iter().enumerate() {
        let fd = f.principal_part(&face)?;
        let mut comps = vec![fd.clone()];
        comps.extend(fd.gradient_polys());
        let jac: Vec<Vec<Polynomial>> = comps.iter().map(|c| c.gradient_polys()).collect();
        let samples = torus_samples(n, budget, seed.wrapping_add(0x5ca1_ab1e), fi);
        let hit = samples.par_iter().find_map_first(|x0| {
            let mut x = x0.clone();
            for _ in 0..REFINE_MAX_ITER {
                if scalar_singular_point(&fd, &x, 1e-12).unwrap_or(false) {
                    return Some(x);
                }
                let scale: Vec<f64> = comps.iter().map(|c| c.eval_abs(&x).unwrap_or(0.0).max(f64::MIN_POSITIVE)).collect();
                let r = DVector::from_iterator(comps.len(), comps.iter().zip(&scale).map(|(c, s)| c.eval(&x).unwrap_or(0.0) / s));
                let j = DMatrix::from_fn(comps.len(), n, |a, b| jac[a][b].eval(&x).unwrap_or(0.0) / scale[a]);
                let jt = j.transpose();
                let mut a = &jt * &j;
                for d in 0..n {
                    a[(d, d)] += 1e-12 * (1.0 + a[(d, d)]);
                }
                let step = a.lu().solve(&(-(&jt * r)))?;
                for k in 0..n {
                    let v = x[k] + step[k];
                    // stay in the starting orthant
                    x[k] = if v.signum() == x0[k].signum() && v != 0.0 { v } else { x[k] * 0.5 };
                }
                if x.iter().any(|v| !v.is_finite()) {
                    return None;
                }
            }
            scalar_singular_point(&fd, &x, 1e-12).unwrap_or(false).then_some(x)
        });
        out.push((face, hit));
    }
    Ok(out)
}

/// Hypothesis checks of the global Hölder-type error bound.
#[derive(Clone, Debug)]
pub struct PreconditionReport {
    /// `is_convenient(Γ(f_ii))` for each `i`.
    pub convenient: Vec<bool>,
    /// `(i, j, Γ(f_ij) ⊆ Γ(f_ii))` for every ordered pair.
    pub containment: Vec<(usize, usize, bool)>,
    /// A sampled point with `f(x) ≤ 0`, if one was found.
    pub feasible_point: Option<Vec<f64>>,
}

impl PreconditionReport {
    pub fn all_convenient(&self) -> bool {
        self.convenient.iter().all(|c| *c)
    }

    pub fn all_contained(&self) -> bool {
        self.containment.iter().all(|c| c.2)
    }

    pub fn holds(&self) -> bool {
        self.all_convenient() && self.all_contained() && self.feasible_point.is_some()
    }
}

/// Convenience of the diagonal, containment of every entry polyhedron in its
/// row's diagonal one, and a sampling probe for `S_F ≠ ∅`.
pub fn theorem13_preconditions(f: &SymPolyMatrix, seed: u64) -> Result<PreconditionReport> {
    let p = f.p();
    let diag: Vec<NewtonPolyhedron> = (0..p).map(|i| NewtonPolyhedron::of_polynomial(f.entry(i, i))).collect();
    let convenient = diag.iter().map(is_convenient).collect();
    let mut containment = Vec::with_capacity(p * p);
    for i in 0..p {
        for j in 0..p {
            let inner = NewtonPolyhedron::of_polynomial(f.entry(i, j));
            containment.push((i, j, polyhedron_contains(&diag[i], &inner)?));
        }
    }
    let feasible_point = probe_feasible_point(f, seed)?;
    Ok(PreconditionReport { convenient, containment, feasible_point })
}

/// Looks for `x` with `f(x) ≤ 0`: the origin, random points in growing boxes,
/// then a short subgradient flow from the best sample.
pub fn probe_feasible_point(f: &SymPolyMatrix, seed: u64) -> Result<Option<Vec<f64>>> {
    let n = f.n();
    let origin = vec![0.0; n];
    if f.f(&origin)? <= 0.0 {
        return Ok(Some(origin));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::INFINITY, origin);
    for radius in [1.0, 10.0, 100.0] {
        for _ in 0..2000 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
            let v = f.f(&x)?;
            if v <= 0.0 {
                return Ok(Some(x));
            }
            if v < best.0 {
                best = (v, x);
            }
        }
    }
    let traj = crate::harness::flow::solve_feasibility_flow(f, &best.1, 1e-12, 2000)?;
    let last = traj.final_point();
    Ok((f.f(last)? <= 0.0).then(|| last.to_vec()))
}
