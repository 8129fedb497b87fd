#![allow(dead_code)]

use eigbound::polynomial::{ExponentVector, Polynomial, Rational};
use eigbound::SymPolyMatrix;
use num_bigint::BigInt;
use rand::Rng;

pub fn rat(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

pub fn poly(n: usize, terms: &[(&[u32], i64)]) -> Polynomial {
    Polynomial::from_int_terms(n, terms).unwrap()
}

pub fn var(n: usize, s: usize) -> Polynomial {
    Polynomial::variable(n, s)
}

/// Random polynomial in `n` variables of total degree at most `deg`
/// with small rational coefficients.
pub fn random_poly<R: Rng>(rng: &mut R, n: usize, deg: u32, max_terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(n);
    let terms = rng.gen_range(1..=max_terms);
    for _ in 0..terms {
        let mut e = vec![0u32; n];
        let total = rng.gen_range(0..=deg);
        for _ in 0..total {
            e[rng.gen_range(0..n)] += 1;
        }
        let c = rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        p.add_term(ExponentVector::new(e), c);
    }
    p
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, p: usize, deg: u32) -> SymPolyMatrix {
    let mut entries = Vec::new();
    for i in 0..p {
        for j in i..p {
            entries.push((i, j, random_poly(rng, n, deg, 3)));
        }
    }
    SymPolyMatrix::from_entries(n, p, entries).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..=r)).collect()
}

pub fn bloch() -> SymPolyMatrix {
    SymPolyMatrix::from_entries(2, 2, vec![(0, 0, var(2, 0)), (0, 1, var(2, 1)), (1, 1, -&var(2, 0))]).unwrap()
}
