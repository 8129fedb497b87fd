//! Dense two-phase simplex with Bland's rule, generic over the scalar field.
//!
//! The exact [`Rational`] instance decides polyhedral predicates (vertex
//! extraction, face-hood, membership). The `f64` instance uses a fixed
//! feasibility tolerance of `1e-10` and backs the per-point degeneracy LP.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polynomial::Rational;

/// Feasibility / pivot tolerance of the floating-point instance.
pub const F64_TOL: f64 = 1e-10;

const MAX_PIVOTS: usize = 100_000;

pub trait LpScalar: Clone + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn compare(&self, o: &Self) -> Ordering;
    fn is_exact_zero(&self) -> bool;
    fn is_exact_negative(&self) -> bool;
}

impl LpScalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn compare(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_exact_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.abs() <= F64_TOL
    }
    fn is_positive(&self) -> bool {
        *self > F64_TOL
    }
    fn is_negative(&self) -> bool {
        *self < -F64_TOL
    }
    fn compare(&self, o: &Self) -> Ordering {
        if (self - o).abs() <= F64_TOL {
            Ordering::Equal
        } else if self < o {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_exact_negative(&self) -> bool {
        *self < 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, objective: T },
    /// Phase 1 ended with a positive sum of artificial variables.
    Infeasible { infeasibility: T },
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }
}

/// `maximize cᵀx` subject to row constraints; variables are `≥ 0` unless marked free.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    num_vars: usize,
    free: Vec<bool>,
    rows: Vec<(Vec<T>, Relation, T)>,
    objective: Vec<T>,
}

impl<T: LpScalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            free: vec![false; num_vars],
            rows: Vec::new(),
            objective: vec![T::zero(); num_vars],
        }
    }

    pub fn set_free(&mut self, j: usize) {
        self.free[j] = true;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<T>, rel: Relation, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width mismatch");
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn maximize(&mut self, coeffs: Vec<T>) {
        assert_eq!(coeffs.len(), self.num_vars, "objective width mismatch");
        self.objective = coeffs;
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self) -> Result<LpOutcome<T>> {
        Tableau::build(self).run(self)
    }
}

struct Tableau<T> {
    /// rows × (cols + 1); the last column is the right-hand side.
    a: Vec<Vec<T>>,
    basis: Vec<usize>,
    cols: usize,
    first_artificial: usize,
    /// For each original variable: (positive column, optional negative column).
    var_cols: Vec<(usize, Option<usize>)>,
}

impl<T: LpScalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let mut var_cols = Vec::with_capacity(lp.num_vars);
        let mut next = 0;
        for j in 0..lp.num_vars {
            if lp.free[j] {
                var_cols.push((next, Some(next + 1)));
                next += 2;
            } else {
                var_cols.push((next, None));
                next += 1;
            }
        }
        let num_slacks = lp.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let first_slack = next;
        let first_artificial = first_slack + num_slacks;
        let m = lp.rows.len();
        let cols = first_artificial + m;

        let mut a = Vec::with_capacity(m);
        let mut slack = first_slack;
        for (i, (coeffs, rel, rhs)) in lp.rows.iter().enumerate() {
            let mut row = vec![T::zero(); cols + 1];
            for (j, c) in coeffs.iter().enumerate() {
                let (pos, neg) = var_cols[j];
                row[pos] = c.clone();
                if let Some(neg) = neg {
                    row[neg] = c.neg();
                }
            }
            match rel {
                Relation::Le => {
                    row[slack] = T::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = T::one().neg();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[cols] = rhs.clone();
            if rhs.is_exact_negative() {
                for v in row.iter_mut() {
                    *v = v.neg();
                }
            }
            row[first_artificial + i] = T::one();
            a.push(row);
        }
        let basis = (0..m).map(|i| first_artificial + i).collect();
        Self { a, basis, cols, first_artificial, var_cols }
    }

    fn pivot(&mut self, obj: &mut [T], r: usize, c: usize) {
        let piv = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            *v = v.div(&piv);
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_exact_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_exact_zero() {
                    *v = v.sub(&factor.mul(pv));
                }
            }
            row[c] = T::zero();
        }
        let factor = obj[c].clone();
        for (v, pv) in obj.iter_mut().zip(&pivot_row) {
            *v = v.sub(&factor.mul(pv));
        }
        obj[c] = T::zero();
        self.basis[r] = c;
    }

    /// Minimizes the row `obj` (reduced costs, last entry = −value) over allowed columns.
    fn optimize(&mut self, obj: &mut [T], allowed: usize, pivots: &mut usize) -> Result<bool> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| obj[j].is_negative()) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = row[self.cols].div(&row[enter]);
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => match ratio.compare(lr) {
                        Ordering::Less => true,
                        Ordering::Equal => self.basis[i] < self.basis[*li],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(obj, r, enter);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::Numeric(format!(
                    "simplex exceeded {MAX_PIVOTS} pivots ({} rows, {} columns)",
                    self.a.len(),
                    self.cols
                )));
            }
        }
    }

    fn run(mut self, lp: &LinearProgram<T>) -> Result<LpOutcome<T>> {
        let cols = self.cols;
        let mut pivots = 0;

        // Phase 1: minimize the sum of artificials.
        let mut obj = vec![T::zero(); cols + 1];
        for row in &self.a {
            for j in 0..self.first_artificial {
                obj[j] = obj[j].sub(&row[j]);
            }
            obj[cols] = obj[cols].sub(&row[cols]);
        }
        self.optimize(&mut obj, self.first_artificial, &mut pivots)?;
        let infeasibility = obj[cols].neg();
        if infeasibility.is_positive() {
            return Ok(LpOutcome::Infeasible { infeasibility });
        }

        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&j| !self.a[i][j].is_zero());
                match col {
                    Some(j) => {
                        self.pivot(&mut obj, i, j);
                        i += 1;
                    }
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }

        // Phase 2: minimize −cᵀx.
        let mut cost = vec![T::zero(); cols];
        for (j, c) in lp.objective.iter().enumerate() {
            let (pos, neg) = self.var_cols[j];
            cost[pos] = c.neg();
            if let Some(neg) = neg {
                cost[neg] = c.clone();
            }
        }
        let mut obj = vec![T::zero(); cols + 1];
        obj[..cols].clone_from_slice(&cost);
        for (row, &b) in self.a.iter().zip(&self.basis) {
            let cb = cost[b].clone();
            if cb.is_exact_zero() {
                continue;
            }
            for j in 0..=cols {
                obj[j] = obj[j].sub(&cb.mul(&row[j]));
            }
        }
        if !self.optimize(&mut obj, self.first_artificial, &mut pivots)? {
            return Ok(LpOutcome::Unbounded);
        }

        let mut values = vec![T::zero(); cols];
        for (row, &b) in self.a.iter().zip(&self.basis) {
            values[b] = row[cols].clone();
        }
        let x: Vec<T> = self
            .var_cols
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => values[pos].sub(&values[neg]),
                None => values[pos].clone(),
            })
            .collect();
        let objective = lp
            .objective
            .iter()
            .zip(&x)
            .fold(T::zero(), |acc, (c, v)| acc.add(&c.mul(v)));
        Ok(LpOutcome::Optimal { x, objective })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(a: i64) -> Rational {
        Rational::from_integer(BigInt::from(a))
    }

    #[test]
    fn textbook_maximum_exact() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.add_constraint(vec![q(1), q(0)], Relation::Le, q(4));
        lp.add_constraint(vec![q(0), q(2)], Relation::Le, q(12));
        lp.add_constraint(vec![q(3), q(2)], Relation::Le, q(18));
        lp.maximize(vec![q(3), q(5)]);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { x, objective } => {
                assert_eq!(x, vec![q(2), q(6)]);
                assert_eq!(objective, q(36));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp: LinearProgram<Rational> = LinearProgram::new(1);
        lp.add_constraint(vec![q(1)], Relation::Ge, q(2));
        lp.add_constraint(vec![q(1)], Relation::Le, q(1));
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Infeasible { .. }));

        let mut lp: LinearProgram<Rational> = LinearProgram::new(1);
        lp.set_free(0);
        lp.maximize(vec![q(1)]);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities_f64() {
        // x free, y >= 0: x + y = 1, x - y = 3 -> x = 2, y = -1 infeasible; with x - y = -3 -> x=-1, y=2
        let mut lp = LinearProgram::new(2);
        lp.set_free(0);
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add_constraint(vec![1.0, -1.0], Relation::Eq, 3.0);
        assert!(!lp.solve().unwrap().is_feasible());

        let mut lp = LinearProgram::new(2);
        lp.set_free(0);
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add_constraint(vec![1.0, -1.0], Relation::Eq, -3.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { x, .. } => {
                assert!((x[0] + 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let mut lp = LinearProgram::new(2);
        lp.add_constraint(vec![q(1), q(1)], Relation::Eq, q(2));
        lp.add_constraint(vec![q(2), q(2)], Relation::Eq, q(4));
        lp.maximize(vec![q(1), q(0)]);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { objective, .. } => assert_eq!(objective, q(2)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
