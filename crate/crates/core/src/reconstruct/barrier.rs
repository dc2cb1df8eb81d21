//! Primal log-barrier path following on the LMI reformulation.
//!
//! Minimizes `Σ γᵢ` over `γ ∈ [a, b]ⁿ` subject to `M(γ) ⪰ 0` by damped
//! Newton steps on
//!
//! ```text
//! ψ_t(γ) = t·Σγᵢ − log det M_s(γ) − Σ log(γᵢ − a) − Σ log(b − γᵢ)
//! ```
//!
//! with `t` scaled up per outer stage until the barrier gap `ν/t` falls
//! below the requested tolerance (`ν = D + m + 2n`).
//!
//! Gradient and Hessian come from trace identities: with
//! `G = (M⁻¹)` restricted to the interface block,
//! `∂ᵢ(−log det M) = −tr(M⁻¹ B̃ᵢ)` and the Hessian term is
//! `tr(G B̂ᵢ G B̂ⱼ)` over the compressed arc matrices. The interface block is
//! obtained from one envelope factorization per iterate plus one unit solve
//! per interface DOF.
//!
//! Feasibility at exact data can have an empty interior (components of the
//! true coefficient at the upper bound), so the target is always lifted by a
//! small slack on its diagonal. Phase 1 computes the minimal slack exactly:
//! by Loewner monotonicity the most feasible point of the box is `b·𝟙`, so
//! the needed slack is `max(0, −λ_min(Ŷ − F(b·𝟙)))`.

use super::lmi::schur_embed;
use super::{IterationRecord, KktReport, SdpOptions, SdpSolution, SolveStatus};
use crate::assembly::AssembledSystem;
use crate::forward::ForwardEval;
use crate::numerics::{min_eig, spectral_norm_sym, SpdFactor};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Newton decrement² target while following the path (loose centering).
const STAGE_TOL: f64 = 5e-3;
/// Newton decrement² target for the final polish at the last barrier stage.
const NEWTON_TOL: f64 = 1e-10;
const ARMIJO: f64 = 0.25;
const MAX_BACKTRACKS: usize = 60;

/// Compressed per-arc mass blocks over the interface DOF set.
struct ArcBlocks {
    dofs: Vec<usize>,
    /// Per arc: full COO (both orientations) in local indices.
    entries: Vec<Vec<(usize, usize, f64)>>,
}

impl ArcBlocks {
    fn new(sys: &AssembledSystem) -> Self {
        let dofs = sys.interface_dofs.clone();
        let mut pos = vec![usize::MAX; sys.dof_count];
        for (l, &d) in dofs.iter().enumerate() {
            pos[d] = l;
        }
        let entries = sys
            .interface_mass
            .iter()
            .map(|mass| {
                let mut ents = Vec::with_capacity(2 * mass.nnz());
                for (p, q, v) in mass.iter() {
                    let (lp, lq) = (pos[p], pos[q]);
                    ents.push((lp, lq, v));
                    if lp != lq {
                        ents.push((lq, lp, v));
                    }
                }
                ents
            })
            .collect();
        ArcBlocks { dofs, entries }
    }

    /// Interface block of `M⁻¹`, symmetrized. One unit solve per interface
    /// DOF; the solves are independent and run on the pool.
    fn inverse_block(&self, factor: &SpdFactor) -> DMatrix<f64> {
        let s = self.dofs.len();
        let cols = crate::exec::map_indexed(s, |l| {
            let col = factor.solve_unit(self.dofs[l]);
            self.dofs.iter().map(|&dr| col[dr]).collect::<Vec<f64>>()
        });
        let mut g = DMatrix::zeros(s, s);
        for (l, col) in cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                g[(r, l)] = v;
            }
        }
        for r in 0..s {
            for c in 0..r {
                let v = 0.5 * (g[(r, c)] + g[(c, r)]);
                g[(r, c)] = v;
                g[(c, r)] = v;
            }
        }
        g
    }

    /// `tr(M⁻¹ B̃ᵢ)` for every arc.
    fn traces(&self, g: &DMatrix<f64>) -> Vec<f64> {
        self.entries
            .iter()
            .map(|ents| ents.iter().map(|&(p, q, v)| v * g[(p, q)]).sum())
            .collect()
    }

    /// `tr(G B̂ᵢ G B̂ⱼ)` for all arc pairs (symmetric).
    fn hessian_block(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.entries.len();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = 0.0;
                for &(bi, ci, u) in &self.entries[i] {
                    for &(dj, aj, v) in &self.entries[j] {
                        acc += u * v * g[(aj, bi)] * g[(ci, dj)];
                    }
                }
                h[(i, j)] = acc;
                h[(j, i)] = acc;
            }
        }
        h
    }
}

fn barrier_value(t: f64, gamma: &[f64], a: f64, b: f64, logdet: f64) -> f64 {
    let linear: f64 = gamma.iter().sum();
    let boxes: f64 = gamma
        .iter()
        .map(|&g| -((g - a).ln()) - ((b - g).ln()))
        .sum();
    t * linear - logdet + boxes
}

fn solve_newton_system(h: &DMatrix<f64>, grad: &DVector<f64>) -> Result<DVector<f64>> {
    let n = h.nrows();
    let base = h.trace().abs().max(1.0) / n as f64;
    let mut ridge = 0.0f64;
    for _ in 0..30 {
        let hm = if ridge > 0.0 {
            h + DMatrix::identity(n, n) * ridge
        } else {
            h.clone()
        };
        if let Some(ch) = hm.cholesky() {
            return Ok(ch.solve(&(-grad)));
        }
        ridge = if ridge == 0.0 { 1e-14 * base } else { ridge * 100.0 };
    }
    Err(Error::Numeric("newton system is numerically singular".into()))
}

pub(super) fn solve(
    sys: &AssembledSystem,
    target: &DMatrix<f64>,
    a: f64,
    b: f64,
    opts: &SdpOptions,
) -> Result<SdpSolution> {
    if !(a.is_finite() && b.is_finite() && a > 0.0 && a < b) {
        return Err(Error::Domain(format!(
            "bounds must satisfy 0 < a < b, got a = {a}, b = {b}"
        )));
    }
    let n = sys.n;
    let m = sys.m;
    let y_norm = spectral_norm_sym(&DMatrix::from_fn(m, m, |r, c| {
        0.5 * (target[(r, c)] + target[(c, r)])
    }))?;

    // Phase 1: the box point with the largest feasibility margin is b·1.
    let upper = vec![b; n];
    let f_upper = ForwardEval::new(sys, &upper)?.measurement(sys);
    let margin = min_eig(&(target - &f_upper))?;
    let kkt_infeasible = KktReport {
        schur_min_eig: margin,
        box_slack: 0.0,
        barrier_t: 0.0,
        slack: 0.0,
    };
    if -margin > opts.feas_tol * (1.0 + y_norm) {
        return Ok(SdpSolution {
            gamma: upper,
            objective: b * n as f64,
            status: SolveStatus::Infeasible,
            kkt: kkt_infeasible,
            trace: Vec::new(),
        });
    }
    let s_min = (-margin).max(0.0);
    let lift = 1e-12 * (1.0 + y_norm);
    let mut slack = s_min + lift;

    let lmi = schur_embed(sys, target)?;
    let blocks = ArcBlocks::new(sys);
    let nu = (sys.dof_count + m + 2 * n) as f64;

    // Strictly feasible start near the upper corner.
    let mut start: Option<(Vec<f64>, SpdFactor)> = None;
    'slack_search: for _ in 0..8 {
        let mut eps = 1e-3;
        while eps >= 1e-14 {
            let gamma: Vec<f64> = vec![b - eps * (b - a); n];
            if let Ok(f) = lmi.factorize(&gamma, slack, 0.0) {
                start = Some((gamma, f));
                break 'slack_search;
            }
            eps /= 10.0;
        }
        slack *= 10.0;
    }
    let (mut gamma, mut factor) = start.ok_or_else(|| {
        Error::Numeric("no strictly feasible starting point for the barrier".into())
    })?;

    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut t = opts.t_init;
    let mut status = SolveStatus::MaxIter;
    // loose centering along the path; a final polish stage at the last t
    // drives the Newton decrement down before reporting optimality
    let mut polish = false;

    'outer: for outer in 0..opts.max_outer {
        let stage_tol = if polish { NEWTON_TOL } else { STAGE_TOL };
        for newton in 0..opts.max_newton {
            let g_block = blocks.inverse_block(&factor);
            let traces = blocks.traces(&g_block);
            let mut grad = DVector::zeros(n);
            for i in 0..n {
                grad[i] = t - traces[i] - 1.0 / (gamma[i] - a) + 1.0 / (b - gamma[i]);
            }
            let mut hess = blocks.hessian_block(&g_block);
            for i in 0..n {
                hess[(i, i)] += 1.0 / (gamma[i] - a).powi(2) + 1.0 / (b - gamma[i]).powi(2);
            }
            let step = solve_newton_system(&hess, &grad)?;
            let decrement_sq = -grad.dot(&step);
            let schur = factor.trailing_schur(m);
            trace.push(IterationRecord {
                outer,
                newton,
                barrier_t: t,
                objective: gamma.iter().sum(),
                schur_min_eig: min_eig(&schur)? - slack,
                decrement: decrement_sq.max(0.0).sqrt(),
            });
            if decrement_sq <= 2.0 * stage_tol {
                break;
            }

            let psi0 = barrier_value(t, &gamma, a, b, factor.logdet());
            // stay strictly inside the box before trying factorizations
            let mut alpha = 1.0f64;
            for i in 0..n {
                let d = step[i];
                if d > 0.0 {
                    alpha = alpha.min(0.99 * (b - gamma[i]) / d);
                } else if d < 0.0 {
                    alpha = alpha.min(0.99 * (gamma[i] - a) / (-d));
                }
            }
            let mut accepted = false;
            for _ in 0..MAX_BACKTRACKS {
                let trial: Vec<f64> = gamma
                    .iter()
                    .zip(step.iter())
                    .map(|(g, d)| g + alpha * d)
                    .collect();
                if trial.iter().all(|&g| g > a && g < b) {
                    if let Ok(trial_factor) = lmi.factorize(&trial, slack, 0.0) {
                        let psi = barrier_value(t, &trial, a, b, trial_factor.logdet());
                        if psi <= psi0 - ARMIJO * alpha * decrement_sq {
                            gamma = trial;
                            factor = trial_factor;
                            accepted = true;
                            break;
                        }
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                // numerically stuck at this stage; move on with larger t
                break;
            }
        }
        if polish {
            status = SolveStatus::Optimal;
            break 'outer;
        }
        if nu / t < opts.gap_tol {
            polish = true;
        } else {
            t *= opts.t_scale;
        }
    }

    let schur = factor.trailing_schur(m);
    let box_slack = gamma
        .iter()
        .fold(f64::INFINITY, |acc, &g| acc.min(g - a).min(b - g));
    Ok(SdpSolution {
        objective: gamma.iter().sum(),
        gamma,
        status,
        kkt: KktReport {
            schur_min_eig: min_eig(&schur)? - slack,
            box_slack,
            barrier_t: t,
            slack,
        },
        trace,
    })
}
