//! Least-squares estimate of the local gradient exponent.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::harness::region::{sample_region, Region};
use crate::spectral::SymPolyMatrix;

pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    /// Fitted slope of `ln m_f` against `ln |f − f̄|`.
    pub theta_hat: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub usable: usize,
    pub samples: usize,
    pub f_ref: f64,
}

/// Fits `ln m_f(x) ≈ a + θ ln |f(x) − f(x̄)|` over samples of `region`.
pub fn empirical_exponent(f: &SymPolyMatrix, x_ref: &[f64], region: &Region, samples: usize, seed: u64) -> Result<ExponentFit> {
    check_dim(f.n(), x_ref.len(), "reference point")?;
    check_dim(f.n(), region.dim(), "region")?;
    let cloud = sample_region(region, samples, seed)?;
    let f_ref = f.f(x_ref)?;
    let pairs: Vec<Option<(f64, f64)>> = cloud
        .points
        .par_iter()
        .map(|x| {
            let fx = f.f(x).ok()?;
            let slope = f.slope(x).ok()?;
            let gap = (fx - f_ref).abs();
            (gap > 0.0 && slope > 0.0 && gap.is_finite() && slope.is_finite()).then(|| (gap.ln(), slope.ln()))
        })
        .collect();
    let pts: Vec<(f64, f64)> = pairs.into_iter().flatten().collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::Inconclusive(format!(
            "exponent fit needs {MIN_FIT_SAMPLES} samples with f != f(x_ref) and nonzero slope, found {}",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Inconclusive("exponent fit: |f - f(x_ref)| is constant over the samples".into()));
    }
    let theta_hat = sxy / sxx;
    let intercept = my - theta_hat * mx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(ExponentFit { theta_hat, intercept, r_squared, usable: pts.len(), samples, f_ref })
}
