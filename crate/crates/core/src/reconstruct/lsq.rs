//! Box-projected Levenberg–Marquardt baseline for the least-squares
//! residual `‖F(γ) − Ŷ‖²_F`.
//!
//! This is the non-convex data-fitting approach the convex reformulation is
//! compared against: a damped Gauss–Newton iteration with projection onto
//! `[a, b]ⁿ` after every step. It converges to a local minimizer only; the
//! landscape experiments show how far those can be from the truth.

use crate::assembly::AssembledSystem;
use crate::forward::ForwardEval;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct LsqOptions {
    pub max_iter: usize,
    /// Initial Levenberg–Marquardt damping.
    pub damping_init: f64,
    /// Damping factor on a rejected step.
    pub damping_up: f64,
    /// Damping factor on an accepted step.
    pub damping_down: f64,
    /// Gradient convergence threshold (relative to `1 + cost`).
    pub grad_tol: f64,
    /// Step-size convergence threshold (relative to `1 + ‖γ‖_∞`).
    pub step_tol: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        LsqOptions {
            max_iter: 200,
            damping_init: 1e-3,
            damping_up: 10.0,
            damping_down: 0.1,
            grad_tol: 1e-12,
            step_tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LsqResult {
    pub gamma: Vec<f64>,
    /// Frobenius residual squared after every accepted step (first entry is
    /// the initial cost); non-increasing by construction.
    pub residual_trace: Vec<f64>,
    pub iterations: usize,
    /// False when the iteration cap or a damping stall ended the run.
    pub converged: bool,
}

fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Minimizes `‖F(γ) − Ŷ‖²_F` over the box from `gamma0`.
pub fn lsq_baseline(
    sys: &AssembledSystem,
    y_target: &DMatrix<f64>,
    gamma0: &[f64],
    a: f64,
    b: f64,
    opts: &LsqOptions,
) -> Result<LsqResult> {
    let n = sys.n;
    if gamma0.len() != n {
        return Err(Error::Domain(format!(
            "start has {} components, system has n = {n}",
            gamma0.len()
        )));
    }
    if !(a > 0.0 && a < b) {
        return Err(Error::Domain(format!("bounds must satisfy 0 < a < b, got {a}, {b}")));
    }
    if gamma0.iter().any(|&g| g < a || g > b) {
        return Err(Error::Domain("start lies outside the bounds".into()));
    }

    let cost_of = |gamma: &[f64]| -> Result<f64> {
        let f = ForwardEval::new(sys, gamma)?.measurement(sys);
        let r = f - y_target;
        Ok(r.norm_squared())
    };

    let mut gamma = gamma0.to_vec();
    let mut damping = opts.damping_init;
    let mut cost;
    {
        cost = cost_of(&gamma)?;
    }
    let mut trace = vec![cost];
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..opts.max_iter {
        iterations = iter + 1;
        let eval = ForwardEval::new(sys, &gamma)?;
        let f = eval.measurement(sys);
        let residual = &f - y_target;
        let grams = eval.arc_grams(sys);

        // normal equations from the trace inner products
        let mut jtj = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = frob_inner(&grams[i], &grams[j]);
                jtj[(i, j)] = v;
                jtj[(j, i)] = v;
            }
        }
        let mut rhs = DVector::zeros(n);
        for i in 0..n {
            rhs[i] = frob_inner(&grams[i], &residual);
        }
        if rhs.amax() <= opts.grad_tol * (1.0 + cost) {
            converged = true;
            break;
        }

        let mut accepted = false;
        for _ in 0..40 {
            let mut damped = jtj.clone();
            for i in 0..n {
                let d = jtj[(i, i)].max(1e-300);
                damped[(i, i)] += damping * d;
            }
            let step = match damped.clone().cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => {
                    damping *= opts.damping_up;
                    continue;
                }
            };
            let trial: Vec<f64> = gamma
                .iter()
                .zip(step.iter())
                .map(|(g, s)| (g + s).clamp(a, b))
                .collect();
            let trial_cost = cost_of(&trial)?;
            if trial_cost < cost {
                let step_inf = gamma
                    .iter()
                    .zip(&trial)
                    .map(|(g, t)| (g - t).abs())
                    .fold(0.0f64, f64::max);
                gamma = trial;
                cost = trial_cost;
                trace.push(cost);
                damping = (damping * opts.damping_down).max(1e-14);
                accepted = true;
                if step_inf <= opts.step_tol * (1.0 + gamma.iter().fold(0.0f64, |m, &g| m.max(g))) {
                    converged = true;
                }
                break;
            }
            damping *= opts.damping_up;
            if damping > 1e14 {
                break;
            }
        }
        if converged {
            break;
        }
        if !accepted {
            // damping stalled: no decreasing step exists at this scale;
            // treat as converged only if the gradient is already small
            converged = rhs.amax() <= 1e-6 * (1.0 + cost);
            break;
        }
    }

    Ok(LsqResult {
        gamma,
        residual_trace: trace,
        iterations,
        converged,
    })
}
