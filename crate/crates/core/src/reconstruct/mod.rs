//! Global reconstruction through the convex semidefinite reformulation,
//! plus the nonlinear least-squares baseline and admissible-set sampling.
//!
//! The noiseless program minimizes `Σ γᵢ` over `γ ∈ [a, b]ⁿ` subject to
//! `F(γ) ⪯ Ŷ`; when the certification criterion holds, its unique minimizer
//! is the true coefficient. The constraint is handled through the exact LMI
//! embedding ([`schur_embed`]) and solved by a primal log-barrier method.
//! The noisy variant replaces the target by `Y^δ + δI` and reports the
//! stability-based error bound `2δ(n−1)/λ` when a certification result with
//! scale constant `C = n−1` and positive `λ` is available.

mod admissible;
mod barrier;
mod lmi;
mod lsq;
mod noise;

pub use admissible::{admissible_set_sample, AdmissibleGrid};
pub use lmi::{schur_embed, sign_with_band, LmiProblem};
pub use lsq::{lsq_baseline, LsqOptions, LsqResult};
pub use noise::noise_matrix;

use crate::assembly::AssembledSystem;
use crate::certify::CriterionResult;
use crate::{Error, Result};
use nalgebra::DMatrix;
use serde::Serialize;

/// Barrier solver options.
#[derive(Debug, Clone, Serialize)]
pub struct SdpOptions {
    /// Target barrier gap `ν/t` at exit.
    pub gap_tol: f64,
    /// Phase-1 infeasibility threshold (relative to the target norm).
    pub feas_tol: f64,
    /// Maximum number of outer (barrier parameter) stages.
    pub max_outer: usize,
    /// Maximum Newton iterations per stage.
    pub max_newton: usize,
    /// Initial barrier parameter `t`.
    pub t_init: f64,
    /// Multiplicative `t` update per stage.
    pub t_scale: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_outer: 60,
            max_newton: 50,
            t_init: 1.0,
            t_scale: 10.0,
        }
    }
}

impl SdpOptions {
    /// Tighter gap for small systems where the acceptance bounds are strict.
    pub fn with_gap(gap_tol: f64) -> Self {
        SdpOptions {
            gap_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIter,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::MaxIter => "max_iter",
        };
        write!(f, "{s}")
    }
}

/// Exit diagnostics of a barrier solve.
#[derive(Debug, Clone, Serialize)]
pub struct KktReport {
    /// Smallest eigenvalue of `Ŷ − F(γ*)` (raw target, slack removed).
    pub schur_min_eig: f64,
    /// Smallest distance of `γ*` to the box bounds.
    pub box_slack: f64,
    /// Barrier parameter at exit.
    pub barrier_t: f64,
    /// Diagonal slack added to the target for strict feasibility.
    pub slack: f64,
}

/// One Newton iteration record.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub outer: usize,
    pub newton: usize,
    pub barrier_t: f64,
    pub objective: f64,
    /// Smallest eigenvalue of the raw Schur complement at this iterate.
    pub schur_min_eig: f64,
    pub decrement: f64,
}

/// Result of a semidefinite reconstruction.
#[derive(Debug, Clone, Serialize)]
pub struct SdpSolution {
    pub gamma: Vec<f64>,
    /// `Σ γᵢ` at exit.
    pub objective: f64,
    pub status: SolveStatus,
    pub kkt: KktReport,
    #[serde(skip)]
    pub trace: Vec<IterationRecord>,
}

impl SdpSolution {
    /// CSV trace: `iteration,objective,min_eig,barrier_t`.
    pub fn write_trace_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "iteration,objective,min_eig,barrier_t")?;
        for (i, rec) in self.trace.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                i, rec.objective, rec.schur_min_eig, rec.barrier_t
            )?;
        }
        Ok(())
    }
}

/// Solves the noiseless convex program `min Σγᵢ` s.t. `γ ∈ [a,b]ⁿ`,
/// `F(γ) ⪯ Y_target`.
pub fn solve_sdp(
    sys: &AssembledSystem,
    y_target: &DMatrix<f64>,
    a: f64,
    b: f64,
    opts: &SdpOptions,
) -> Result<SdpSolution> {
    barrier::solve(sys, y_target, a, b, opts)
}

/// Noisy measurement with a spectral-norm noise bound.
#[derive(Debug, Clone)]
pub struct NoisyInput {
    pub y_delta: DMatrix<f64>,
    pub delta: f64,
}

impl NoisyInput {
    pub fn new(y_delta: DMatrix<f64>, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::Domain(format!("noise bound must be >= 0, got {delta}")));
        }
        Ok(NoisyInput { y_delta, delta })
    }
}

/// Stability-based reconstruction error bound for noisy data.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// `2δ(n−1)/λ`, when a usable criterion result was supplied.
    pub bound: Option<f64>,
    /// The `λ` that produced the bound.
    pub lambda: Option<f64>,
}

impl std::fmt::Display for BoundReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.bound {
            Some(b) => write!(f, "error bound {b:e}"),
            None => write!(f, "bound unavailable"),
        }
    }
}

/// Solves the noisy program with target `Y^δ + δI` and reports the error
/// bound `2δ(n−1)/λ` when `criterion` was evaluated with `C = n−1` and is
/// satisfied.
pub fn solve_sdp_noisy(
    sys: &AssembledSystem,
    noisy: &NoisyInput,
    a: f64,
    b: f64,
    opts: &SdpOptions,
    criterion: Option<&CriterionResult>,
) -> Result<(SdpSolution, BoundReport)> {
    let m = sys.m;
    if noisy.y_delta.nrows() != m || noisy.y_delta.ncols() != m {
        return Err(Error::Domain(format!(
            "noisy measurement is {}x{}, system has m = {m}",
            noisy.y_delta.nrows(),
            noisy.y_delta.ncols()
        )));
    }
    let target = &noisy.y_delta + DMatrix::identity(m, m) * noisy.delta;
    let solution = barrier::solve(sys, &target, a, b, opts)?;
    let expected_c = (sys.n - 1) as f64;
    let report = match criterion {
        Some(c) if (c.grid.c - expected_c).abs() <= 1e-9 && c.lambda > 0.0 => BoundReport {
            bound: Some(2.0 * noisy.delta * expected_c / c.lambda),
            lambda: Some(c.lambda),
        },
        _ => BoundReport {
            bound: None,
            lambda: None,
        },
    };
    Ok((solution, report))
}
