//! The largest-eigenvalue function `f(x) = λ_max(F(x))` of a symmetric
//! polynomial matrix, its top eigenspace and the Clarke subdifferential model
//! `∂°f(x) = {(tr(W A_s))_s : W ⪰ 0, tr W = 1}` with `A_s = Qᵀ ∂_s F(x) Q`.

use nalgebra::DMatrix;

use crate::error::{check_dim, input, Error, Result};
use crate::linalg::{dot, jacobi_eigen, norm};
use crate::polynomial::{CompiledPolynomial, Polynomial};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
pub const SLOPE_GAP_TOL: f64 = 1e-16;
pub const SLOPE_MAX_ITER: usize = 10_000;
const BARRIER_NEWTON_STEPS: usize = 50;
const BARRIER_SHRINK: f64 = 0.1;

/// Tolerances accepted for a density matrix handed to [`SubdiffModel::clarke_point`].
const DENSITY_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-10;

fn packed_index(p: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * p - i * (i + 1) / 2 + j
}

/// A symmetric `p × p` matrix of polynomials in `n` variables, stored as its
/// upper triangle.
#[derive(Clone, Debug)]
pub struct SymPolyMatrix {
    n: usize,
    p: usize,
    entries: Vec<Polynomial>,
    compiled: Vec<CompiledPolynomial>,
    // partials[s][idx] = ∂f_idx/∂x_s
    partials: Vec<Vec<CompiledPolynomial>>,
}

impl PartialEq for SymPolyMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.p == other.p && self.entries == other.entries
    }
}

impl SymPolyMatrix {
    /// Builds `F` from `(i, j, f_ij)` triples (0-based, either triangle). Missing
    /// entries are zero; giving both `(i, j)` and `(j, i)` is an error.
    pub fn from_entries(n: usize, p: usize, entries: Vec<(usize, usize, Polynomial)>) -> Result<Self> {
        if p == 0 {
            return input("matrix order p must be at least 1");
        }
        let mut slots: Vec<Option<Polynomial>> = vec![None; p * (p + 1) / 2];
        for (i, j, poly) in entries {
            if i >= p || j >= p {
                return input(format!("entry ({i}, {j}) outside a {p}x{p} matrix"));
            }
            check_dim(n, poly.n(), "matrix entry")?;
            let idx = packed_index(p, i, j);
            if slots[idx].is_some() {
                return input(format!("entry ({}, {}) given twice", i.min(j), i.max(j)));
            }
            slots[idx] = Some(poly);
        }
        let entries = slots.into_iter().map(|e| e.unwrap_or_else(|| Polynomial::zero(n))).collect();
        Ok(Self::from_packed(n, p, entries))
    }

    fn from_packed(n: usize, p: usize, entries: Vec<Polynomial>) -> Self {
        let compiled = entries.iter().map(Polynomial::compile).collect();
        let partials = (0..n)
            .map(|s| entries.iter().map(|e| e.partial(s).compile()).collect())
            .collect();
        Self { n, p, entries, compiled, partials }
    }

    /// The `1 × 1` matrix `[f]`.
    pub fn scalar(f: Polynomial) -> Self {
        let n = f.n();
        Self::from_packed(n, 1, vec![f])
    }

    /// `diag(f_1, …, f_p)`.
    pub fn diagonal(diag: Vec<Polynomial>) -> Result<Self> {
        let Some(first) = diag.first() else {
            return input("diagonal matrix needs at least one entry");
        };
        let n = first.n();
        let p = diag.len();
        Self::from_entries(n, p, diag.into_iter().enumerate().map(|(i, f)| (i, i, f)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `f_ij` (0-based, symmetric access).
    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[packed_index(self.p, i, j)]
    }

    /// Upper-triangle entries `(i, j, f_ij)` with `i ≤ j`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, &Polynomial)> {
        let p = self.p;
        (0..p).flat_map(move |i| (i..p).map(move |j| (i, j))).map(move |(i, j)| (i, j, self.entry(i, j)))
    }

    /// `d = max deg f_ij`.
    pub fn degree(&self) -> u32 {
        self.entries.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// Applies `op` to every upper entry, keeping the shape.
    pub fn map_entries<E>(&self, mut op: impl FnMut(usize, usize, &Polynomial) -> std::result::Result<Polynomial, E>) -> std::result::Result<Self, E> {
        let mut out = Vec::with_capacity(self.entries.len());
        for (i, j, e) in self.upper_entries() {
            out.push(op(i, j, e)?);
        }
        let n = out.first().map(Polynomial::n).unwrap_or(self.n);
        Ok(Self::from_packed(n, self.p, out))
    }

    fn fill(&self, polys: &[CompiledPolynomial], x: &[f64]) -> DMatrix<f64> {
        let p = self.p;
        let mut m = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in i..p {
                let v = polys[packed_index(p, i, j)].eval_unchecked(x);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// `F(x)`, exactly symmetric.
    pub fn eval_matrix(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.n, x.len(), "point")?;
        Ok(self.fill(&self.compiled, x))
    }

    /// `∂F/∂x_s (x)` for `s = 0, …, n−1`.
    pub fn partial_matrices(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        check_dim(self.n, x.len(), "point")?;
        Ok(self.partials.iter().map(|ps| self.fill(ps, x)).collect())
    }

    /// `(f(x), [f(x)]₊)`.
    pub fn largest_eigenvalue(&self, x: &[f64]) -> Result<(f64, f64)> {
        let m = self.eval_matrix(x)?;
        let f = jacobi_eigen(&m)?.max();
        Ok((f, f.max(0.0)))
    }

    /// `f(x)` alone.
    pub fn f(&self, x: &[f64]) -> Result<f64> {
        Ok(self.largest_eigenvalue(x)?.0)
    }

    pub fn top_eigenspace(&self, x: &[f64], cluster_tol: f64) -> Result<TopEigenspace> {
        if !(cluster_tol > 0.0) {
            return input(format!("cluster_tol must be positive, got {cluster_tol}"));
        }
        let m = self.eval_matrix(x)?;
        let eig = jacobi_eigen(&m)?;
        let lmax = eig.max();
        let cutoff = cluster_tol * lmax.abs().max(1.0);
        let mult = eig.values.iter().take_while(|&&l| lmax - l <= cutoff).count();
        let basis = eig.vectors.columns(0, mult).into_owned();
        Ok(TopEigenspace {
            point: x.to_vec(),
            lambda_max: lmax,
            basis,
            multiplicity: mult,
            cluster_tol,
            spectrum: eig.values,
        })
    }

    pub fn subdiff_model(&self, x: &[f64], cluster_tol: f64) -> Result<SubdiffModel> {
        let eigenspace = self.top_eigenspace(x, cluster_tol)?;
        let q = &eigenspace.basis;
        let generators = self
            .partial_matrices(x)?
            .into_iter()
            .map(|d| {
                let mut a = q.transpose() * d * q;
                symmetrize(&mut a);
                a
            })
            .collect();
        Ok(SubdiffModel { generators, eigenspace })
    }

    /// Clarke slope of `f` at `x` with the default cluster tolerance.
    pub fn slope(&self, x: &[f64]) -> Result<f64> {
        Ok(self.subdiff_model(x, DEFAULT_CLUSTER_TOL)?.clarke_slope().slope)
    }

    /// Evaluates `G_r(x, λ, v¹, …, vʳ) = Σ_l μ_l ⟨F(x)v^l, v^l⟩` with
    /// `μ = (λ_1, …, λ_{r−1}, 1 − Σλ)` and its gradient blocks.
    pub fn g_r_probe(&self, x: &[f64], lambda: &[f64], vectors: &[Vec<f64>]) -> Result<GrProbe> {
        let r = vectors.len();
        if r == 0 {
            return input("g_r_probe needs at least one vector");
        }
        if r > self.n + 1 {
            return input(format!("g_r_probe: r = {r} exceeds n + 1 = {}", self.n + 1));
        }
        check_dim(r - 1, lambda.len(), "simplex weights")?;
        let total: f64 = lambda.iter().sum();
        if lambda.iter().any(|&l| !(l >= 0.0)) || total > 1.0 + UNIT_TOL {
            return input("g_r_probe: weights outside the simplex");
        }
        for v in vectors {
            check_dim(self.p, v.len(), "eigenvector candidate")?;
            if (norm(v) - 1.0).abs() > UNIT_TOL {
                return input("g_r_probe: every vector must have unit norm");
            }
        }
        let mut mu = lambda.to_vec();
        mu.push((1.0 - total).max(0.0));

        let fx = self.eval_matrix(x)?;
        let partials = self.partial_matrices(x)?;
        let quad = |a: &DMatrix<f64>, v: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..v.len() {
                for j in 0..v.len() {
                    s += a[(i, j)] * v[i] * v[j];
                }
            }
            s
        };
        let g: Vec<f64> = vectors.iter().map(|v| quad(&fx, v)).collect();
        let value = dot(&mu, &g);
        let x_block: Vec<f64> = partials
            .iter()
            .map(|d| vectors.iter().zip(&mu).map(|(v, m)| m * quad(d, v)).sum())
            .collect();
        let lambda_block: Vec<f64> = (0..r - 1).map(|l| g[l] - g[r - 1]).collect();
        let v_blocks: Vec<Vec<f64>> = vectors
            .iter()
            .zip(&mu)
            .map(|(v, m)| {
                let fv = &fx * nalgebra::DVector::from_column_slice(v);
                fv.iter().map(|c| 2.0 * m * c).collect()
            })
            .collect();
        let block_norm = norm(&x_block) + norm(&lambda_block) + v_blocks.iter().map(|b| norm(b)).sum::<f64>();

        let eig = jacobi_eigen(&fx)?;
        let f = eig.max();
        let eig_tol = DEFAULT_CLUSTER_TOL * f.abs().max(1.0);
        let all_eigen = vectors.iter().all(|v| {
            let fv = &fx * nalgebra::DVector::from_column_slice(v);
            fv.iter().zip(v).map(|(a, b)| (a - f * b).powi(2)).sum::<f64>().sqrt() <= eig_tol
        });
        let w_norm = norm(&x_block);
        let identity_residual = all_eigen.then(|| (block_norm - (w_norm + 2.0 * f.abs())).abs());
        Ok(GrProbe { value, x_block, lambda_block, v_blocks, block_norm, f, identity_residual })
    }
}

/// Orthonormal basis of the symmetric trace-zero `m × m` matrices.
fn trace_zero_basis(m: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(m * (m + 1) / 2 - 1);
    for k in 1..m {
        // Diagonal directions e_1 + … + e_k − k e_{k+1}, normalized.
        let c = 1.0 / ((k * (k + 1)) as f64).sqrt();
        out.push(DMatrix::from_fn(m, m, |i, j| {
            if i != j {
                0.0
            } else if i < k {
                c
            } else if i == k {
                -(k as f64) * c
            } else {
                0.0
            }
        }));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..m {
        for j in (i + 1)..m {
            let mut b = DMatrix::zeros(m, m);
            b[(i, j)] = h;
            b[(j, i)] = h;
            out.push(b);
        }
    }
    out
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let m = a.nrows();
    for i in 0..m {
        for j in (i + 1)..m {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// The clustered top eigenspace `E(x)` of `F(x)`.
#[derive(Clone, Debug)]
pub struct TopEigenspace {
    pub point: Vec<f64>,
    pub lambda_max: f64,
    /// `p × m` column-orthonormal basis `Q`.
    pub basis: DMatrix<f64>,
    pub multiplicity: usize,
    pub cluster_tol: f64,
    /// Full spectrum of `F(x)`, descending.
    pub spectrum: Vec<f64>,
}

impl TopEigenspace {
    /// Largest distance from a unit vector of `self` to the unit sphere of
    /// `other`, i.e. `2 sin(φ/2)` for the largest principal angle `φ`.
    pub fn distance_into(&self, other: &TopEigenspace) -> Result<f64> {
        check_dim(other.basis.nrows(), self.basis.nrows(), "eigenspace ambient dimension")?;
        let resid = &self.basis - &other.basis * (other.basis.transpose() * &self.basis);
        let sin_sq = jacobi_eigen(&(resid.transpose() * &resid))?.max().clamp(0.0, 1.0);
        Ok((2.0 * sin_sq / (1.0 + (1.0 - sin_sq).sqrt())).sqrt())
    }
}

/// Result of [`SubdiffModel::clarke_slope`].
#[derive(Clone, Debug)]
pub struct SlopeResult {
    pub slope: f64,
    /// Minimizing density matrix `W`.
    pub density: DMatrix<f64>,
    /// The minimum-norm Clarke subgradient `clarke_point(W)`.
    pub subgradient: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub gap: f64,
}

/// Compressed generators `A_s = Qᵀ ∂_s F(x) Q` of the Clarke subdifferential.
#[derive(Clone, Debug)]
pub struct SubdiffModel {
    pub generators: Vec<DMatrix<f64>>,
    pub eigenspace: TopEigenspace,
}

impl SubdiffModel {
    /// Builds a model directly from generators, mainly for tests and oracles.
    pub fn from_generators(generators: Vec<DMatrix<f64>>, eigenspace: TopEigenspace) -> Result<Self> {
        let m = eigenspace.multiplicity;
        for a in &generators {
            if a.nrows() != m || a.ncols() != m {
                return input("generator shape does not match the eigenspace multiplicity");
            }
        }
        Ok(Self { generators, eigenspace })
    }

    pub fn n(&self) -> usize {
        self.generators.len()
    }

    pub fn multiplicity(&self) -> usize {
        self.eigenspace.multiplicity
    }

    fn image(&self, w: &DMatrix<f64>) -> Vec<f64> {
        self.generators.iter().map(|a| a.component_mul(w).sum()).collect()
    }

    fn rank_one_image(&self, u: &[f64]) -> Vec<f64> {
        self.generators
            .iter()
            .map(|a| {
                let mut s = 0.0;
                for i in 0..u.len() {
                    for j in 0..u.len() {
                        s += a[(i, j)] * u[i] * u[j];
                    }
                }
                s
            })
            .collect()
    }

    /// `(tr(W A_1), …, tr(W A_n))` for a density matrix `W`.
    pub fn clarke_point(&self, w: &DMatrix<f64>) -> Result<Vec<f64>> {
        let m = self.multiplicity();
        if w.nrows() != m || w.ncols() != m {
            return input(format!("density matrix must be {m}x{m}"));
        }
        if (w - w.transpose()).amax() > DENSITY_TOL {
            return input("density matrix is not symmetric");
        }
        if (w.trace() - 1.0).abs() > DENSITY_TOL {
            return input(format!("density matrix trace {} differs from 1", w.trace()));
        }
        if jacobi_eigen(w)?.min() < -DENSITY_TOL {
            return input("density matrix is not positive semidefinite");
        }
        Ok(self.image(w))
    }

    /// Minimum norm over `∂°f(x)`: a log-barrier Newton method for
    /// `min ‖g(W)‖²` over the spectraplex, followed by the Frank–Wolfe gap at
    /// the final density as the optimality certificate.
    pub fn clarke_slope(&self) -> SlopeResult {
        let m = self.multiplicity();
        let w0 = DMatrix::identity(m, m) / m as f64;
        if m == 1 || self.n() == 0 {
            let g = self.image(&w0);
            return SlopeResult { slope: norm(&g), density: w0, subgradient: g, converged: true, iterations: 0, gap: 0.0 };
        }
        let scale: f64 = self.generators.iter().map(|a| a.norm_squared()).sum::<f64>().max(1.0);
        let basis = trace_zero_basis(m);
        // Coordinates of the generators in the trace-zero basis and their trace parts.
        let coords: Vec<Vec<f64>> = self.generators.iter().map(|a| basis.iter().map(|b| a.component_mul(b).sum()).collect()).collect();
        let dim = basis.len();
        let mut w = w0;
        let mut mu = scale;
        let mut iterations = 0;
        while mu * m as f64 > SLOPE_GAP_TOL * scale && iterations < SLOPE_MAX_ITER {
            for _ in 0..BARRIER_NEWTON_STEPS {
                iterations += 1;
                let Some(chol) = w.clone().cholesky() else { break };
                let w_inv = chol.inverse();
                let g = self.image(&w);
                let mut grad = nalgebra::DVector::zeros(dim);
                let mut hess = DMatrix::zeros(dim, dim);
                let wb: Vec<DMatrix<f64>> = basis.iter().map(|b| &w_inv * b).collect();
                for k in 0..dim {
                    grad[k] = 2.0 * coords.iter().zip(&g).map(|(c, gs)| gs * c[k]).sum::<f64>() - mu * wb[k].trace();
                    for l in k..dim {
                        let h = 2.0 * coords.iter().map(|c| c[k] * c[l]).sum::<f64>() + mu * (&wb[k] * &wb[l]).trace();
                        hess[(k, l)] = h;
                        hess[(l, k)] = h;
                    }
                }
                let Some(step) = hess.clone().cholesky().map(|c| c.solve(&(-&grad))) else { break };
                let decrement = -grad.dot(&step);
                if decrement <= 1e-30 * scale {
                    break;
                }
                let direction = basis.iter().zip(step.iter()).fold(DMatrix::zeros(m, m), |acc, (b, t)| acc + b * *t);
                let barrier = |v: &DMatrix<f64>| -> Option<f64> {
                    let c = v.clone().cholesky()?;
                    let log_det: f64 = 2.0 * c.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
                    let gv = self.image(v);
                    Some(dot(&gv, &gv) - mu * log_det)
                };
                let current = barrier(&w).unwrap_or(f64::INFINITY);
                let mut t = 1.0;
                let mut moved = false;
                while t > 1e-12 {
                    let cand = &w + &direction * t;
                    if let Some(v) = barrier(&cand) {
                        if v <= current - 0.25 * t * decrement {
                            w = cand;
                            moved = true;
                            break;
                        }
                    }
                    t *= 0.5;
                }
                if !moved || decrement < 1e-12 * mu {
                    break;
                }
            }
            mu *= BARRIER_SHRINK;
        }
        let g = self.image(&w);
        let gap = self.duality_gap(&g);
        let converged = gap <= SLOPE_GAP_TOL.sqrt() * scale;
        SlopeResult { slope: norm(&g), density: w, subgradient: g, converged, iterations, gap }
    }

    /// `2(‖g‖² − min_u ⟨g, g(uuᵀ)⟩)`, an upper bound on `‖g‖² − slope²`.
    fn duality_gap(&self, g: &[f64]) -> f64 {
        match jacobi_eigen(&self.weighted_sum(g)) {
            Ok(e) => (2.0 * (dot(g, g) - dot(g, &self.rank_one_image(&e.min_vector())))).max(0.0),
            Err(_) => f64::INFINITY,
        }
    }

    fn weighted_sum(&self, coeffs: &[f64]) -> DMatrix<f64> {
        let m = self.multiplicity();
        let mut out = DMatrix::zeros(m, m);
        for (a, c) in self.generators.iter().zip(coeffs) {
            out += a * *c;
        }
        out
    }

    /// `max_{W} ⟨d, clarke_point(W)⟩ = λ_max(Σ_s d_s A_s)`.
    pub fn directional_derivative(&self, d: &[f64]) -> Result<f64> {
        check_dim(self.n(), d.len(), "direction")?;
        let m = self.multiplicity();
        let mut s = DMatrix::zeros(m, m);
        for (a, ds) in self.generators.iter().zip(d) {
            s += a * *ds;
        }
        if m == 0 {
            return Err(Error::Numeric("empty eigenspace".into()));
        }
        Ok(jacobi_eigen(&s)?.max())
    }
}

/// Output of [`SymPolyMatrix::g_r_probe`].
#[derive(Clone, Debug)]
pub struct GrProbe {
    pub value: f64,
    /// `∇_x G_r = w = Σ μ_l ∇_x⟨F(x)v^l, v^l⟩`.
    pub x_block: Vec<f64>,
    pub lambda_block: Vec<f64>,
    pub v_blocks: Vec<Vec<f64>>,
    /// `‖∇_x‖ + ‖∇_λ‖ + Σ_l ‖∇_{v^l}‖`.
    pub block_norm: f64,
    pub f: f64,
    /// `|block_norm − (‖w‖ + 2|f(x)|)|`, present only when every `v^l` is a top eigenvector.
    pub identity_residual: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::Rational;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bloch() -> SymPolyMatrix {
        let x1 = Polynomial::variable(2, 0);
        let x2 = Polynomial::variable(2, 1);
        SymPolyMatrix::from_entries(2, 2, vec![(0, 0, x1.clone()), (0, 1, x2), (1, 1, -&x1)]).unwrap()
    }

    fn int(c: i64) -> Rational {
        Rational::from_integer(BigInt::from(c))
    }

    #[test]
    fn eval_and_eigen() {
        let f = bloch();
        let m = f.eval_matrix(&[3.0, 4.0]).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[3.0, 4.0, 4.0, -3.0]));
        assert!((f.f(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-14);
        let x = Polynomial::variable(1, 0);
        let d = SymPolyMatrix::diagonal(vec![x.clone(), -&x]).unwrap();
        let (v, vp) = d.largest_eigenvalue(&[-2.0]).unwrap();
        assert_eq!((v, vp), (2.0, 2.0));
        let sq = SymPolyMatrix::scalar(&x * &x);
        assert_eq!(sq.eval_matrix(&[2.0]).unwrap()[(0, 0)], 4.0);
        let z = SymPolyMatrix::from_entries(2, 3, vec![]).unwrap();
        assert_eq!(z.eval_matrix(&[1.0, 2.0]).unwrap(), DMatrix::zeros(3, 3));
        assert!(f.eval_matrix(&[1.0]).is_err());
    }

    #[test]
    fn duplicate_entry_rejected() {
        let x1 = Polynomial::variable(1, 0);
        assert!(SymPolyMatrix::from_entries(1, 2, vec![(0, 1, x1.clone()), (1, 0, x1)]).is_err());
    }

    #[test]
    fn rayleigh_sampling_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = bloch();
        let x = [0.7, -1.3];
        let fx = f.f(&x).unwrap();
        let m = f.eval_matrix(&x).unwrap();
        let mut best = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let v: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nv = norm(&v);
            let v: Vec<f64> = v.iter().map(|c| c / nv).collect();
            let q = m[(0, 0)] * v[0] * v[0] + 2.0 * m[(0, 1)] * v[0] * v[1] + m[(1, 1)] * v[1] * v[1];
            best = best.max(q);
        }
        assert!(best <= fx + 1e-12);
        assert!(fx - best <= 1e-6);
    }

    #[test]
    fn eigenspace_examples() {
        let f = bloch();
        let e = f.top_eigenspace(&[3.0, 4.0], DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(e.multiplicity, 1);
        let q = e.basis.column(0);
        assert!((q[0] / q[1] - 2.0).abs() < 1e-12);
        let e0 = f.top_eigenspace(&[0.0, 0.0], DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(e0.multiplicity, 2);
        let t = DEFAULT_CLUSTER_TOL / 2.0;
        let one = int(1);
        let near = Rational::from_float(1.0 - t).unwrap();
        let c = SymPolyMatrix::diagonal(vec![
            Polynomial::constant(1, one),
            Polynomial::constant(1, near),
            Polynomial::zero(1),
        ])
        .unwrap();
        assert_eq!(c.top_eigenspace(&[0.0], DEFAULT_CLUSTER_TOL).unwrap().multiplicity, 2);
    }

    #[test]
    fn bloch_model_and_slope() {
        let f = bloch();
        let m = f.subdiff_model(&[0.0, 0.0], DEFAULT_CLUSTER_TOL).unwrap();
        let half = DMatrix::identity(2, 2) * 0.5;
        let g = m.clarke_point(&half).unwrap();
        assert!(norm(&g) < 1e-14);
        for k in 0..16 {
            let t = k as f64 * 0.4;
            let u = [t.cos(), t.sin()];
            let uu = DMatrix::from_fn(2, 2, |i, j| u[i] * u[j]);
            let qu: Vec<f64> = (0..2).map(|i| (m.eigenspace.basis.row(i) * nalgebra::DVector::from_column_slice(&u))[0]).collect();
            let quu = DMatrix::from_fn(2, 2, |i, j| qu[i] * qu[j]);
            let g = m.clarke_point(&uu).unwrap();
            assert!((norm(&g) - 1.0).abs() < 1e-12);
            let expected = [quu[(0, 0)] - quu[(1, 1)], 2.0 * quu[(0, 1)]];
            assert!((g[0] - expected[0]).abs() < 1e-12 && (g[1] - expected[1]).abs() < 1e-12);
        }
        let s = m.clarke_slope();
        assert!(s.slope < 1e-12 && s.converged);
        let s34 = f.subdiff_model(&[3.0, 4.0], DEFAULT_CLUSTER_TOL).unwrap().clarke_slope();
        assert!((s34.slope - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let d = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            assert!((m.directional_derivative(&d).unwrap() - norm(&d)).abs() <= 1e-8);
        }
    }

    #[test]
    fn clarke_point_validates_density() {
        let m = bloch().subdiff_model(&[0.0, 0.0], DEFAULT_CLUSTER_TOL).unwrap();
        let bad_trace = DMatrix::identity(2, 2);
        assert!(m.clarke_point(&bad_trace).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.5, 0.0, 0.0, -0.5]);
        assert!(m.clarke_point(&indefinite).is_err());
    }

    #[test]
    fn scalar_model_is_gradient() {
        let x1 = Polynomial::variable(2, 0);
        let x2 = Polynomial::variable(2, 1);
        let f = &(&x1 * &x1) + &(&(&x1 * &x2).scale(&int(3)));
        let mat = SymPolyMatrix::scalar(f.clone());
        let x = [0.5, -2.0];
        let model = mat.subdiff_model(&x, DEFAULT_CLUSTER_TOL).unwrap();
        let grad = f.grad(&x).unwrap();
        let slope = model.clarke_slope().slope;
        assert!((slope - norm(&grad)).abs() < 1e-12);
        let d = [0.3, 0.4];
        assert!((model.directional_derivative(&d).unwrap() - dot(&grad, &d)).abs() < 1e-12);
    }

    fn random_model(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SubdiffModel {
        let gens: Vec<DMatrix<f64>> = (0..n)
            .map(|_| {
                let a = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
                (&a + a.transpose()) * 0.5
            })
            .collect();
        let eigenspace = TopEigenspace {
            point: vec![0.0; n],
            lambda_max: 0.0,
            basis: DMatrix::identity(m, m),
            multiplicity: m,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            spectrum: vec![0.0; m],
        };
        SubdiffModel::from_generators(gens, eigenspace).unwrap()
    }

    #[test]
    fn slope_matches_sampled_minimum() {
        // Real 2x2 density matrices are W = (I + r_1 σ_z + r_2 σ_x)/2 with ‖r‖ ≤ 1.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let model = random_model(&mut rng, 2, 2);
            let value = |r: [f64; 2]| {
                let w = DMatrix::from_row_slice(2, 2, &[1.0 + r[0], r[1], r[1], 1.0 - r[0]]) * 0.5;
                norm(&model.image(&w))
            };
            let project = |r: [f64; 2]| {
                let l = (r[0] * r[0] + r[1] * r[1]).sqrt();
                if l > 1.0 { [r[0] / l, r[1] / l] } else { r }
            };
            let mut best = ([0.0, 0.0], f64::INFINITY);
            for _ in 0..10_000 {
                let r = project([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
                let v = value(r);
                if v < best.1 {
                    best = (r, v);
                }
            }
            let mut step = 0.05;
            while step > 1e-12 {
                let mut moved = false;
                for d in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
                    let r = project([best.0[0] + step * d[0], best.0[1] + step * d[1]]);
                    let v = value(r);
                    if v < best.1 {
                        best = (r, v);
                        moved = true;
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
            let s = model.clarke_slope();
            assert!(s.slope <= best.1 + 1e-6, "slope {} {} {} {} oracle {}", s.slope, s.converged, s.iterations, s.gap, best.1);
            assert!(best.1 - s.slope <= 1e-4, "slope {} sampled {}", s.slope, best.1);
        }
    }

    #[test]
    fn g_r_identity_on_eigenvectors() {
        let f = bloch();
        let x = [3.0, 4.0];
        let e = f.top_eigenspace(&x, DEFAULT_CLUSTER_TOL).unwrap();
        let v: Vec<f64> = e.basis.column(0).iter().copied().collect();
        let probe = f.g_r_probe(&x, &[0.4], &[v.clone(), v.iter().map(|c| -c).collect()]).unwrap();
        assert!(probe.identity_residual.unwrap() <= 1e-9);
        assert!((probe.value - 5.0).abs() < 1e-12);
        let single = f.g_r_probe(&x, &[], &[vec![1.0, 0.0]]).unwrap();
        assert!((single.value - 3.0).abs() < 1e-14);
        assert!(single.identity_residual.is_none());
        assert!(f.g_r_probe(&x, &[1.5], &[v.clone(), v.clone()]).is_err());
        assert!(f.g_r_probe(&x, &[], &[vec![1.0, 1.0]]).is_err());
        let z = f.top_eigenspace(&[0.0, 0.0], DEFAULT_CLUSTER_TOL).unwrap();
        let p0 = f.g_r_probe(&[0.0, 0.0], &[0.5], &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(z.multiplicity, 2);
        assert!(p0.identity_residual.unwrap() <= 1e-9);
    }

    #[test]
    fn eigenspace_distance() {
        let f = bloch();
        let a = f.top_eigenspace(&[3.0, 4.0], DEFAULT_CLUSTER_TOL).unwrap();
        let b = f.top_eigenspace(&[3.0, 4.0 + 1e-4], DEFAULT_CLUSTER_TOL).unwrap();
        let d = a.distance_into(&b).unwrap();
        assert!(d > 0.0 && d < 1e-4);
        assert!(a.distance_into(&a).unwrap() < 1e-7);
    }
}
