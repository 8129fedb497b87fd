//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Coefficients are kept as [`Rational`]s so that supports, principal parts and
//! the polyhedral machinery built on top stay exact. Floating-point evaluation
//! converts each coefficient once per call; [`CompiledPolynomial`] caches the
//! converted coefficients for hot loops.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, input, Result};
use crate::newton::{build_polyhedron, support_value_and_face, Face};

pub type Rational = num_rational::BigRational;

/// Converts an exact rational to the nearest double (saturating to ±inf).
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite double.
pub fn f64_to_rational(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| crate::Error::Numeric(format!("non-finite value {x}")))
}

/// Exponent vector `κ` of the monomial `x^κ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `power · e_s`.
    pub fn axis(n: usize, s: usize, power: u32) -> Self {
        let mut v = vec![0; n];
        v[s] = power;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|κ| = κ₁ + … + κₙ`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Exact pairing `⟨q, κ⟩`.
    pub fn pair(&self, q: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(q)
            .filter(|(k, _)| **k != 0)
            .map(|(k, qi)| qi * Rational::from_integer(BigInt::from(*k)))
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(|&k| Rational::from_integer(BigInt::from(k))).collect()
    }

    fn monomial_f64(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(k, _)| **k != 0)
            .map(|(&k, &xi)| xi.powi(k as i32))
            .product()
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// A polynomial `Σ a_κ x^κ` in `n` variables; no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(ExponentVector::zeros(n), c);
        p
    }

    /// The coordinate function `x_s` (0-based `s`).
    pub fn variable(n: usize, s: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(ExponentVector::axis(n, s, 1), Rational::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(n);
        for (exps, c) in terms {
            check_dim(n, exps.len(), "exponent vector")?;
            p.add_term(ExponentVector(exps), c);
        }
        Ok(p)
    }

    /// Convenience constructor with integer coefficients.
    pub fn from_int_terms(n: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        Self::from_terms(
            n,
            terms.iter().map(|(e, c)| (e.to_vec(), Rational::from_integer(BigInt::from(*c)))),
        )
    }

    /// Adds `c·x^κ`, removing the term if it cancels.
    pub fn add_term(&mut self, kappa: ExponentVector, c: Rational) {
        debug_assert_eq!(kappa.len(), self.n);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(kappa);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, kappa: &ExponentVector) -> Option<&Rational> {
        self.terms.get(kappa)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n, x.len(), "eval_poly point")?;
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| rational_to_f64(c) * k.monomial_f64(x))
            .sum())
    }

    /// `Σ |a_κ| |x^κ|`: the magnitude of the individual terms at `x`.
    pub fn eval_abs(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n, x.len(), "eval_abs point")?;
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| rational_to_f64(c).abs() * k.monomial_f64(x).abs())
            .sum())
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Result<Rational> {
        check_dim(self.n, x.len(), "eval_exact point")?;
        let mut acc = Rational::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for (&e, xi) in k.entries().iter().zip(x) {
                if e != 0 {
                    t *= num_traits::pow(xi.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Symbolic partial derivative with respect to `x_s` (0-based).
    pub fn partial(&self, s: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (k, c) in &self.terms {
            let e = k.0[s];
            if e == 0 {
                continue;
            }
            let mut kk = k.0.clone();
            kk[s] -= 1;
            out.add_term(ExponentVector(kk), c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn gradient_polys(&self) -> Vec<Polynomial> {
        (0..self.n).map(|s| self.partial(s)).collect()
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, x.len(), "grad_poly point")?;
        (0..self.n).map(|s| self.partial(s).eval(x)).collect()
    }

    pub fn support(&self) -> BTreeSet<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    /// Maximum `|κ|` over the support; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(ExponentVector::degree).max().unwrap_or(0)
    }

    pub fn support_and_degree(&self) -> (BTreeSet<ExponentVector>, u32) {
        (self.support(), self.degree())
    }

    /// Sets every variable outside `axes` (0-based indices) to zero.
    pub fn restrict_to_axes(&self, axes: &[usize]) -> Result<Polynomial> {
        if axes.is_empty() {
            return input("restrict_to_axes: axis set must be nonempty");
        }
        if let Some(&bad) = axes.iter().find(|&&s| s >= self.n) {
            return input(format!("restrict_to_axes: axis {bad} out of range for n = {}", self.n));
        }
        let keep: Vec<bool> = (0..self.n).map(|s| axes.contains(&s)).collect();
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.0.iter().zip(&keep).all(|(&e, &kp)| kp || e == 0))
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        Ok(Polynomial { n: self.n, terms })
    }

    /// The principal part `f_Δ = Σ_{κ ∈ Δ} a_κ x^κ` for a face `Δ` of `Γ(f)`.
    pub fn principal_part(&self, face: &Face) -> Result<Polynomial> {
        check_dim(self.n, face.witness_q.len(), "face witness")?;
        let gamma = build_polyhedron(&self.support(), self.n)?;
        if gamma.is_empty() {
            return input("principal_part: the zero polynomial has no faces");
        }
        let actual = support_value_and_face(&gamma, &face.witness_q)?;
        if actual.vertices != face.vertices || actual.support_value != face.support_value {
            return input("principal_part: the given face is not a face of the Newton polyhedron");
        }
        Ok(self.terms_on_hyperplane(&face.witness_q, &face.support_value))
    }

    /// Terms whose exponent satisfies `⟨q, κ⟩ = value`.
    pub(crate) fn terms_on_hyperplane(&self, q: &[Rational], value: &Rational) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| &k.pair(q) == value)
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        Polynomial { n: self.n, terms }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), a * c);
        }
        out
    }

    /// Embeds into `n + extra` variables; the new variables come last.
    pub fn extend_vars(&self, extra: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut kk = k.0.clone();
                kk.extend(std::iter::repeat_n(0, extra));
                (ExponentVector(kk), c.clone())
            })
            .collect();
        Polynomial { n: self.n + extra, terms }
    }

    pub fn compile(&self) -> CompiledPolynomial {
        CompiledPolynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| {
                    let exps: Vec<(usize, i32)> = k
                        .0
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e != 0)
                        .map(|(i, &e)| (i, e as i32))
                        .collect();
                    (exps, rational_to_f64(c))
                })
                .collect(),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n, "polynomial variable counts differ");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n, "polynomial variable counts differ");
        let mut out = Polynomial::zero(self.n);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka.add(kb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let vars: Vec<String> = k
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Floating-point copy of a polynomial for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPolynomial {
    n: usize,
    terms: Vec<(Vec<(usize, i32)>, f64)>,
}

impl CompiledPolynomial {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Evaluates without a dimension check; callers validate `x` once.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(exps, c)| c * exps.iter().map(|&(i, e)| x[i].powi(e)).product::<f64>())
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}
