//! Sampling regions and deterministic sample clouds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{input, Result};
use crate::linalg::norm;

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Axis-aligned box `∏ [lo_k, hi_k]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// `{x : inner ≤ ‖x‖ ≤ outer}` around the origin.
    Shell { n: usize, inner: f64, outer: f64 },
}

impl Region {
    /// The cube `[lo, hi]ⁿ`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        Region::Box { lo: vec![lo; n], hi: vec![hi; n] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box { lo, .. } => lo.len(),
            Region::Ball { center, .. } => center.len(),
            Region::Shell { n, .. } => *n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        match self {
            Region::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() || !finite(lo) || !finite(hi) {
                    return input("box bounds must be finite vectors of equal, nonzero length");
                }
                if lo.iter().zip(hi).any(|(a, b)| a > b) {
                    return input("box lower bound exceeds upper bound");
                }
            }
            Region::Ball { center, radius } => {
                if center.is_empty() || !finite(center) || !(radius.is_finite() && *radius >= 0.0) {
                    return input("ball needs a finite center and a nonnegative radius");
                }
            }
            Region::Shell { n, inner, outer } => {
                if *n == 0 || !(inner.is_finite() && outer.is_finite() && *inner > 0.0 && inner <= outer) {
                    return input("shell needs 0 < inner <= outer and n >= 1");
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        const SLACK: f64 = 1e-12;
        match self {
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *v >= a - SLACK && *v <= b + SLACK),
            Region::Ball { center, radius } => crate::linalg::dist(x, center) <= radius * (1.0 + SLACK) + SLACK,
            Region::Shell { inner, outer, .. } => {
                let r = norm(x);
                r >= inner * (1.0 - SLACK) && r <= outer * (1.0 + SLACK)
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Box { lo, hi } => (lo.clone(), hi.clone()),
            Region::Ball { center, radius } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
            Region::Shell { n, outer, .. } => (vec![-outer; *n], vec![*outer; *n]),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Region::Box { lo, hi } => format!("box {lo:?} .. {hi:?}"),
            Region::Ball { center, radius } => format!("ball center {center:?} radius {radius}"),
            Region::Shell { inner, outer, .. } => format!("shell {inner} <= |x| <= {outer}"),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Region::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| if a == b { *a } else { rng.gen_range(*a..=*b) })
                .collect(),
            Region::Ball { center, radius } => {
                let n = center.len();
                let dir = unit_direction(n, rng);
                let r = radius * rng.gen::<f64>().powf(1.0 / n as f64);
                center.iter().zip(&dir).map(|(c, d)| c + r * d).collect()
            }
            Region::Shell { n, inner, outer } => {
                let dir = unit_direction(*n, rng);
                let r = if inner == outer { *inner } else { (rng.gen_range(inner.ln()..=outer.ln())).exp() };
                dir.iter().map(|d| r * d).collect()
            }
        }
    }
}

fn unit_direction(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let l = norm(&v);
        if l > 1e-300 {
            return v.iter().map(|c| c / l).collect();
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampleCloud {
    pub points: Vec<Vec<f64>>,
    pub region: Region,
    pub seed: u64,
}

/// `count` reproducible points: uniform in a box or ball, log-uniform radius
/// with uniform direction in a shell.
pub fn sample_region(region: &Region, count: usize, seed: u64) -> Result<SampleCloud> {
    region.validate()?;
    if count == 0 {
        return input("sample_region: count must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count).map(|_| region.draw(&mut rng)).collect();
    Ok(SampleCloud { points, region: region.clone(), seed })
}
