//! Newton polyhedra at infinity `Γ(A) = conv(A ∪ {0})` and their faces.
//!
//! Every predicate here is decided with exact rational linear programs, so
//! degenerate supports (collinear lattice points, repeated vertices) are
//! classified correctly.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{check_dim, input, Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::polynomial::{ExponentVector, Polynomial, Rational};

/// Size caps for exhaustive face enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceEnumerationLimits {
    pub max_dim: usize,
    pub max_vertices: usize,
}

impl Default for FaceEnumerationLimits {
    fn default() -> Self {
        Self { max_dim: 6, max_vertices: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolyhedron {
    n: usize,
    /// Sorted, deduplicated extreme points; contains the origin unless empty.
    vertices: Vec<ExponentVector>,
    generators: Vec<ExponentVector>,
}

/// A face `Δ(q, Γ)` together with the normal `q` that exposes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Sorted vertex set of the face.
    pub vertices: Vec<ExponentVector>,
    pub witness_q: Vec<Rational>,
    /// `d(q, Γ) = min_{κ ∈ Γ} ⟨q, κ⟩`.
    pub support_value: Rational,
    /// True iff the face does not contain the origin.
    pub at_infinity: bool,
}

impl Face {
    pub fn dimension_hint(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn contains_vertex(&self, v: &ExponentVector) -> bool {
        self.vertices.binary_search(v).is_ok()
    }
}

/// The unique decomposition `Δ = Δ₁ + … + Δ_k` of a face of a Minkowski sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceDecomposition {
    pub parts: Vec<Face>,
}

impl NewtonPolyhedron {
    pub fn empty(n: usize) -> Self {
        Self { n, vertices: Vec::new(), generators: Vec::new() }
    }

    /// `Γ(f)`; empty for the zero polynomial.
    pub fn of_polynomial(p: &Polynomial) -> Self {
        build_polyhedron(&p.support(), p.n()).expect("polynomial supports have consistent length")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[ExponentVector] {
        &self.vertices
    }

    pub fn generators(&self) -> &[ExponentVector] {
        &self.generators
    }

    /// `d(q, Γ)`.
    pub fn support_value(&self, q: &[Rational]) -> Result<Rational> {
        Ok(support_value_and_face(self, q)?.support_value)
    }

    /// Exact membership of a lattice point in `Γ`.
    pub fn contains_point(&self, point: &ExponentVector) -> Result<bool> {
        check_dim(self.n, point.len(), "membership point")?;
        if self.is_empty() {
            return Ok(false);
        }
        point_in_hull(&self.vertices, &point.to_rationals())
    }
}

fn as_rationals(points: &[ExponentVector]) -> Vec<Vec<Rational>> {
    points.iter().map(ExponentVector::to_rationals).collect()
}

/// Decides whether `target ∈ conv(points)`.
fn point_in_hull(points: &[ExponentVector], target: &[Rational]) -> Result<bool> {
    let pts = as_rationals(points);
    point_in_hull_rational(&pts, target)
}

fn point_in_hull_rational(points: &[Vec<Rational>], target: &[Rational]) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    let n = target.len();
    let k = points.len();
    let mut lp = LinearProgram::<Rational>::new(k);
    lp.add_constraint(vec![Rational::one(); k], Relation::Eq, Rational::one());
    for coord in 0..n {
        let row = points.iter().map(|p| p[coord].clone()).collect();
        lp.add_constraint(row, Relation::Eq, target[coord].clone());
    }
    Ok(lp.solve()?.is_feasible())
}

/// Extreme points of `conv(points)`, sorted.
fn extreme_points(points: BTreeSet<ExponentVector>) -> Result<Vec<ExponentVector>> {
    let pts: Vec<ExponentVector> = points.into_iter().collect();
    if pts.len() <= 2 {
        return Ok(pts);
    }
    let rats = as_rationals(&pts);
    let mut keep = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let others: Vec<Vec<Rational>> = rats
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, r)| r.clone())
            .collect();
        if !point_in_hull_rational(&others, &rats[i])? {
            keep.push(p.clone());
        }
    }
    Ok(keep)
}

/// `Γ(A)`: the extreme points of `conv(A ∪ {0})`.
pub fn build_polyhedron(support: &BTreeSet<ExponentVector>, n: usize) -> Result<NewtonPolyhedron> {
    for k in support {
        check_dim(n, k.len(), "support exponent vector")?;
    }
    if support.is_empty() {
        return Ok(NewtonPolyhedron::empty(n));
    }
    let mut points = support.clone();
    points.insert(ExponentVector::zeros(n));
    let vertices = extreme_points(points)?;
    Ok(NewtonPolyhedron { n, vertices, generators: support.iter().cloned().collect() })
}

/// `d(q, Γ)` and the face `Δ(q, Γ)` it exposes.
pub fn support_value_and_face(gamma: &NewtonPolyhedron, q: &[Rational]) -> Result<Face> {
    check_dim(gamma.n, q.len(), "normal vector q")?;
    if gamma.is_empty() {
        return input("support_value_and_face: empty polyhedron");
    }
    let values: Vec<Rational> = gamma.vertices.iter().map(|v| v.pair(q)).collect();
    let min = values.iter().min().cloned().expect("nonempty");
    let vertices: Vec<ExponentVector> = gamma
        .vertices
        .iter()
        .zip(&values)
        .filter(|(_, val)| **val == min)
        .map(|(v, _)| v.clone())
        .collect();
    let at_infinity = !vertices.iter().any(ExponentVector::is_origin);
    Ok(Face { vertices, witness_q: q.to_vec(), support_value: min, at_infinity })
}

/// Minimal face of `Γ` containing the vertex subset `subset`, as vertex indices.
///
/// With `b` the barycenter of the subset, a vertex `u` lies in that face iff
/// `b + ε(b − u) ∈ Γ` for some `ε > 0`.
fn face_closure(verts: &[Vec<Rational>], subset: &BTreeSet<usize>, stop_at: Option<usize>) -> Result<BTreeSet<usize>> {
    let n = verts[0].len();
    let k = verts.len();
    let size = Rational::from_integer(BigInt::from(subset.len()));
    let b: Vec<Rational> = (0..n)
        .map(|c| subset.iter().map(|&i| verts[i][c].clone()).fold(Rational::zero(), |a, x| a + x) / &size)
        .collect();
    let mut closure = subset.clone();
    let order: Vec<usize> = match stop_at {
        Some(s) if !subset.contains(&s) => std::iter::once(s).chain((0..k).filter(|&u| u != s)).collect(),
        _ => (0..k).collect(),
    };
    for u in order {
        if closure.contains(&u) {
            continue;
        }
        // variables: λ_0..λ_{k-1}, ε
        let mut lp = LinearProgram::<Rational>::new(k + 1);
        let mut row = vec![Rational::one(); k];
        row.push(Rational::zero());
        lp.add_constraint(row, Relation::Eq, Rational::one());
        for c in 0..n {
            let mut row: Vec<Rational> = verts.iter().map(|v| v[c].clone()).collect();
            row.push(&verts[u][c] - &b[c]);
            lp.add_constraint(row, Relation::Eq, b[c].clone());
        }
        let mut cap = vec![Rational::zero(); k];
        cap.push(Rational::one());
        lp.add_constraint(cap.clone(), Relation::Le, Rational::one());
        lp.maximize(cap);
        match lp.solve()? {
            LpOutcome::Optimal { objective, .. } if objective > Rational::zero() => {
                closure.insert(u);
                if Some(u) == stop_at {
                    return Ok(closure);
                }
            }
            LpOutcome::Optimal { .. } => {}
            other => {
                return Err(Error::Numeric(format!("face closure LP returned {other:?}")));
            }
        }
    }
    Ok(closure)
}

/// A rational normal `q` exposing exactly the given vertex subset.
fn exposing_normal(verts: &[Vec<Rational>], subset: &BTreeSet<usize>) -> Result<Option<(Vec<Rational>, Rational)>> {
    let n = verts[0].len();
    // variables: q_0..q_{n-1}, c (all free)
    let mut lp = LinearProgram::<Rational>::new(n + 1);
    for j in 0..=n {
        lp.set_free(j);
    }
    for (i, v) in verts.iter().enumerate() {
        let mut row = v.clone();
        row.push(-Rational::one());
        if subset.contains(&i) {
            lp.add_constraint(row, Relation::Eq, Rational::zero());
        } else {
            lp.add_constraint(row, Relation::Ge, Rational::one());
        }
    }
    match lp.solve()? {
        LpOutcome::Optimal { mut x, .. } => {
            let c = x.pop().expect("n + 1 variables");
            Ok(Some((x, c)))
        }
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded => Err(Error::Numeric("exposing-normal LP unbounded with zero objective".into())),
    }
}

/// True iff the vertex subset is exactly the vertex set of some face.
pub fn is_face(gamma: &NewtonPolyhedron, subset: &[ExponentVector]) -> Result<bool> {
    if gamma.is_empty() || subset.is_empty() {
        return Ok(false);
    }
    let mut idx = BTreeSet::new();
    for v in subset {
        match gamma.vertices.binary_search(v) {
            Ok(i) => {
                idx.insert(i);
            }
            Err(_) => return Ok(false),
        }
    }
    let verts = as_rationals(&gamma.vertices);
    Ok(exposing_normal(&verts, &idx)?.is_some())
}

pub fn enumerate_faces_at_infinity(gamma: &NewtonPolyhedron) -> Result<Vec<Face>> {
    enumerate_faces_at_infinity_with(gamma, FaceEnumerationLimits::default())
}

/// All faces of `Γ` not containing the origin, each with an exposing normal.
///
/// Breadth-first over the face lattice: starting from the vertices, every
/// face covering a face `F` is the minimal face containing `F ∪ {u}`. Faces
/// containing the origin are pruned since everything above them contains it too.
pub fn enumerate_faces_at_infinity_with(gamma: &NewtonPolyhedron, limits: FaceEnumerationLimits) -> Result<Vec<Face>> {
    if gamma.is_empty() {
        return Ok(Vec::new());
    }
    if gamma.n > limits.max_dim {
        return Err(Error::Capacity(format!(
            "face enumeration supports n <= {}, got n = {}",
            limits.max_dim, gamma.n
        )));
    }
    if gamma.vertices.len() > limits.max_vertices {
        return Err(Error::Capacity(format!(
            "face enumeration supports at most {} vertices, got {}",
            limits.max_vertices,
            gamma.vertices.len()
        )));
    }
    let verts = as_rationals(&gamma.vertices);
    let origin = gamma
        .vertices
        .iter()
        .position(ExponentVector::is_origin)
        .expect("nonempty Newton polyhedra contain the origin");

    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for i in 0..verts.len() {
        if i != origin {
            let s: BTreeSet<usize> = std::iter::once(i).collect();
            seen.insert(s.clone());
            queue.push_back(s);
        }
    }
    while let Some(face) = queue.pop_front() {
        for u in 0..verts.len() {
            if u == origin || face.contains(&u) {
                continue;
            }
            let mut cand = face.clone();
            cand.insert(u);
            if seen.contains(&cand) {
                continue;
            }
            let closure = face_closure(&verts, &cand, Some(origin))?;
            if closure.contains(&origin) || seen.contains(&closure) {
                continue;
            }
            seen.insert(closure.clone());
            queue.push_back(closure);
        }
    }

    let mut faces = Vec::with_capacity(seen.len());
    for subset in &seen {
        let (q, c) = exposing_normal(&verts, subset)?
            .ok_or_else(|| Error::Numeric("closed vertex set without exposing normal".into()))?;
        faces.push(Face {
            vertices: subset.iter().map(|&i| gamma.vertices[i].clone()).collect(),
            witness_q: q,
            support_value: c,
            at_infinity: true,
        });
    }
    faces.sort_by(|a, b| a.vertices.len().cmp(&b.vertices.len()).then_with(|| a.vertices.cmp(&b.vertices)));
    Ok(faces)
}

/// A vertex on every coordinate axis away from the origin.
pub fn is_convenient(gamma: &NewtonPolyhedron) -> bool {
    if gamma.is_empty() || gamma.n == 0 {
        return false;
    }
    (0..gamma.n).all(|s| {
        gamma.vertices.iter().any(|v| {
            v.entries()
                .iter()
                .enumerate()
                .all(|(j, &e)| if j == s { e > 0 } else { e == 0 })
        })
    })
}

/// `Γ₁ + … + Γ_k`; empty if any summand is empty.
pub fn minkowski_sum(summands: &[&NewtonPolyhedron]) -> Result<NewtonPolyhedron> {
    let Some(first) = summands.first() else {
        return input("minkowski_sum: no summands");
    };
    let n = first.n;
    for g in summands {
        check_dim(n, g.n, "Minkowski summand")?;
    }
    if summands.iter().any(|g| g.is_empty()) {
        return Ok(NewtonPolyhedron::empty(n));
    }
    let mut acc: Vec<ExponentVector> = first.vertices.clone();
    let mut generators = acc.clone();
    for g in &summands[1..] {
        let mut sums = BTreeSet::new();
        for a in &acc {
            for b in &g.vertices {
                sums.insert(a.add(b));
            }
        }
        generators = sums.iter().cloned().collect();
        acc = extreme_points(sums)?;
    }
    Ok(NewtonPolyhedron { n, vertices: acc, generators })
}

/// Splits a face of `Γ₁ + … + Γ_k` into `Δ(q, Γ_i)` using the face's normal.
pub fn decompose_face(face: &Face, summands: &[&NewtonPolyhedron]) -> Result<FaceDecomposition> {
    if summands.is_empty() {
        return input("decompose_face: no summands");
    }
    let n = summands[0].n;
    if face.witness_q.len() != n {
        return input("decompose_face: face lacks a witness normal of matching dimension");
    }
    let parts = summands
        .iter()
        .map(|g| support_value_and_face(g, &face.witness_q))
        .collect::<Result<Vec<_>>>()?;
    let part_hulls: Vec<NewtonPolyhedron> = parts
        .iter()
        .map(|p| NewtonPolyhedron { n, vertices: p.vertices.clone(), generators: p.vertices.clone() })
        .collect();
    let refs: Vec<&NewtonPolyhedron> = part_hulls.iter().collect();
    let sum = minkowski_sum(&refs)?;
    if sum.vertices != face.vertices {
        return input("decompose_face: the face is not a face of the given Minkowski sum");
    }
    Ok(FaceDecomposition { parts })
}

/// `Γ_inner ⊆ Γ_outer`, decided vertex by vertex.
pub fn polyhedron_contains(outer: &NewtonPolyhedron, inner: &NewtonPolyhedron) -> Result<bool> {
    check_dim(outer.n, inner.n, "polyhedron containment")?;
    if inner.is_empty() {
        return Ok(true);
    }
    if outer.is_empty() {
        return Ok(false);
    }
    for v in &inner.vertices {
        if !point_in_hull(&outer.vertices, &v.to_rationals())? {
            return Ok(false);
        }
    }
    Ok(true)
}
