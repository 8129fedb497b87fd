//! Discrete steepest descent on `f₊` toward the feasible set `{F ⪯ 0}`.

use serde::Serialize;

use crate::error::{check_dim, input, Error, Result};
use crate::linalg::{dist, dot};
use crate::spectral::{SymPolyMatrix, DEFAULT_CLUSTER_TOL};

/// Slope below which an infeasible iterate counts as critical.
pub const STALL_SLOPE: f64 = 1e-12;
const MIN_STEP: f64 = 1e-30;

/// Initial trial step of each backtracking search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepPolicy {
    /// Always start from `h = 1`.
    Unit,
    /// Start from `min(1, f₊/‖w‖²)`, the step that zeroes the linear model.
    Polyak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Termination {
    Success,
    Stalled,
    MaxIter,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::Success => "SUCCESS",
            Termination::Stalled => "STALLED",
            Termination::MaxIter => "MAX_ITER",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowStep {
    pub x: Vec<f64>,
    pub f_plus: f64,
    /// Clarke slope at `x`; zero at the terminal iterate of a successful run.
    pub slope: f64,
    /// Accepted step length `h` leaving `x`; zero at the last iterate.
    pub step: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub iterates: Vec<FlowStep>,
    pub total_length: f64,
    pub termination: Termination,
    pub feas_tol: f64,
    pub policy: StepPolicy,
}

impl Trajectory {
    pub fn initial_f_plus(&self) -> f64 {
        self.iterates[0].f_plus
    }

    pub fn final_point(&self) -> &[f64] {
        &self.iterates.last().expect("trajectory has an initial iterate").x
    }

    pub fn final_f_plus(&self) -> f64 {
        self.iterates.last().expect("trajectory has an initial iterate").f_plus
    }

    /// `Σ ‖x_{k+1} − x_k‖` recomputed from the iterates.
    pub fn telescoped_length(&self) -> f64 {
        self.iterates.windows(2).map(|w| dist(&w[0].x, &w[1].x)).sum()
    }

    /// `ln L − η ln f₊(x₀)` for the length exponent `η`; `None` when either
    /// logarithm is undefined.
    pub fn log_length_ratio(&self, eta_log_scale: impl Fn(f64) -> f64) -> Option<f64> {
        let f0 = self.initial_f_plus();
        if self.total_length <= 0.0 || f0 <= 0.0 {
            return None;
        }
        Some(self.total_length.ln() - eta_log_scale(f0.ln()))
    }
}

/// Flow with the Polyak-capped initial step.
pub fn solve_feasibility_flow(f: &SymPolyMatrix, x0: &[f64], feas_tol: f64, max_iter: usize) -> Result<Trajectory> {
    solve_feasibility_flow_with(f, x0, feas_tol, StepPolicy::Polyak, max_iter)
}

pub fn solve_feasibility_flow_with(
    f: &SymPolyMatrix,
    x0: &[f64],
    feas_tol: f64,
    policy: StepPolicy,
    max_iter: usize,
) -> Result<Trajectory> {
    check_dim(f.n(), x0.len(), "flow start point")?;
    if !(feas_tol > 0.0 && feas_tol.is_finite()) {
        return input(format!("feas_tol must be positive, got {feas_tol}"));
    }
    let finite = |v: f64, what: &str| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("flow: non-finite {what}")))
        }
    };
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("flow: non-finite start point".into()));
    }
    let mut x = x0.to_vec();
    let mut fx = finite(f.f(&x)?, "f")?;
    let mut iterates = Vec::new();
    let mut total_length = 0.0;
    let mut iter = 0;
    let termination = loop {
        if fx <= feas_tol {
            iterates.push(FlowStep { x: x.clone(), f_plus: fx.max(0.0), slope: 0.0, step: 0.0 });
            break Termination::Success;
        }
        let res = f.subdiff_model(&x, DEFAULT_CLUSTER_TOL)?.clarke_slope();
        let w = res.subgradient;
        let ww = dot(&w, &w);
        let slope = finite(res.slope, "slope")?;
        if slope < STALL_SLOPE {
            iterates.push(FlowStep { x: x.clone(), f_plus: fx, slope, step: 0.0 });
            break Termination::Stalled;
        }
        if iter >= max_iter {
            iterates.push(FlowStep { x: x.clone(), f_plus: fx, slope, step: 0.0 });
            break Termination::MaxIter;
        }
        let mut h = match policy {
            StepPolicy::Unit => 1.0,
            StepPolicy::Polyak => (fx / ww).min(1.0),
        };
        let accepted = loop {
            let trial: Vec<f64> = x.iter().zip(&w).map(|(a, g)| a - h * g).collect();
            let ft = finite(f.f(&trial)?, "f")?;
            if fx.max(0.0) - ft.max(0.0) >= 0.25 * h * ww {
                break Some((trial, ft));
            }
            h *= 0.5;
            if h < MIN_STEP {
                break None;
            }
        };
        let Some((next, fnext)) = accepted else {
            iterates.push(FlowStep { x: x.clone(), f_plus: fx, slope, step: 0.0 });
            break Termination::Stalled;
        };
        iterates.push(FlowStep { x: x.clone(), f_plus: fx, slope, step: h });
        total_length += dist(&x, &next);
        x = next;
        fx = fnext;
        iter += 1;
    };
    Ok(Trajectory { iterates, total_length, termination, feas_tol, policy })
}
