//! Probe-grid certification of unique solvability and Lipschitz stability.
//!
//! For bounds `0 < a < b` and a scale constant `C` (`1` for plain uniqueness,
//! `n − 1` for the convex reformulation), the derivative of the measurement
//! map is tested at finitely many probe points
//!
//! ```text
//! z_{j,k} = (a/2) e_j' + (a + k·a/(4C)) e_j,    k = 2, …, K
//! d_j     = ((2b − a)/a)·C e_j' − (1/2) e_j
//! ```
//!
//! where `K` is the smallest integer ≥ 2 with `a + K·a/(4C) ≥ b + a/(4C)`.
//! If every `F'(z_{j,k}) d_j` has a positive eigenvalue, the inverse problem
//! restricted to `[a, b]ⁿ` is uniquely solvable, and the smallest of those
//! top eigenvalues is an explicit Lipschitz constant:
//! `‖F(γ¹) − F(γ²)‖₂ ≥ λ ‖γ¹ − γ²‖_∞`.
//!
//! Probe cells are independent and evaluated in parallel; the final minimum
//! is reduced in a fixed order, so the reported `λ` is bit-stable.

use crate::assembly::AssembledSystem;
use crate::exec;
use crate::forward::ForwardEval;
use crate::numerics::max_eig;
use crate::{Error, Result};
use serde::Serialize;

/// Finite probe grid of evaluation points and directions.
#[derive(Debug, Clone)]
pub struct ProbeGrid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    /// Scale constant: 1 or n − 1 in the two criteria.
    pub c: f64,
    /// Largest probe index `K`; cells use `k = 2..=K`.
    pub k_max: usize,
}

impl ProbeGrid {
    /// Probe point `z_{j,k}` (`j` zero-based, `k` in `2..=K`).
    pub fn point(&self, j: usize, k: usize) -> Vec<f64> {
        let mut z = vec![0.5 * self.a; self.n];
        z[j] = self.a + k as f64 * self.a / (4.0 * self.c);
        z
    }

    /// Direction `d_j` (`j` zero-based).
    pub fn direction(&self, j: usize) -> Vec<f64> {
        let mut d = vec![(2.0 * self.b - self.a) / self.a * self.c; self.n];
        d[j] = -0.5;
        d
    }

    /// All `(j, k)` cells in row-major order (`j` outer, `k` inner).
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::with_capacity(self.n * (self.k_max - 1));
        for j in 0..self.n {
            for k in 2..=self.k_max {
                cells.push((j, k));
            }
        }
        cells
    }

    /// The coverage inequality `a + K·a/(4C) ≥ b + a/(4C)` holds.
    pub fn covers(&self) -> bool {
        self.a + self.k_max as f64 * self.a / (4.0 * self.c) >= self.b + self.a / (4.0 * self.c)
    }
}

/// Builds the probe grid; `K` is the smallest integer ≥ 2 satisfying the
/// coverage inequality (ties resolved within 1e-9).
pub fn probe_grid(a: f64, b: f64, n: usize, c: f64) -> Result<ProbeGrid> {
    if !(a.is_finite() && b.is_finite() && a > 0.0 && a < b) {
        return Err(Error::Domain(format!(
            "bounds must satisfy 0 < a < b, got a = {a}, b = {b}"
        )));
    }
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("C must be positive, got {c}")));
    }
    // a + K·a/(4C) ≥ b + a/(4C)  ⇔  K ≥ 4C(b − a)/a + 1
    let threshold = 4.0 * c * (b - a) / a + 1.0;
    let k_max = ((threshold - 1e-9).ceil().max(2.0)) as usize;
    Ok(ProbeGrid { a, b, n, c, k_max })
}

/// One evaluated probe cell.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeEntry {
    /// One-based arc index.
    pub j: usize,
    /// Probe index, `2..=K`.
    pub k: usize,
    /// Largest eigenvalue of `F'(z_{j,k}) d_j`.
    pub lambda_max: f64,
}

/// Result of evaluating a criterion over its probe grid.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub grid: ProbeGrid,
    /// One entry per cell, `j`-major then `k`.
    pub table: Vec<ProbeEntry>,
    /// Exact minimum of the table.
    pub lambda: f64,
    /// `lambda > 0`: the criterion holds.
    pub satisfied: bool,
    /// Electrode count of the evaluated system.
    pub m: usize,
}

/// Compact JSON summary of a criterion evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionSummary {
    pub c: f64,
    pub k: usize,
    pub lambda: f64,
    pub satisfied: bool,
    pub m: usize,
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

impl CriterionResult {
    pub fn summary(&self) -> CriterionSummary {
        CriterionSummary {
            c: self.grid.c,
            k: self.grid.k_max,
            lambda: self.lambda,
            satisfied: self.satisfied,
            m: self.m,
            n: self.grid.n,
            a: self.grid.a,
            b: self.grid.b,
        }
    }

    /// CSV table `j,k,lambda_max` (one-based `j`).
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "j,k,lambda_max")?;
        for e in &self.table {
            writeln!(w, "{},{},{}", e.j, e.k, e.lambda_max)?;
        }
        Ok(())
    }
}

/// Evaluates the criterion table `λ_max(F'(z_{j,k}) d_j)` and the stability
/// constant `λ` for scale constant `c`.
pub fn criterion_lambda(sys: &AssembledSystem, a: f64, b: f64, c: f64) -> Result<CriterionResult> {
    let grid = probe_grid(a, b, sys.n, c)?;
    let cells = grid.cells();
    let lambdas = exec::try_map_indexed(cells.len(), |i| {
        let (j, k) = cells[i];
        let eval = ForwardEval::new(sys, &grid.point(j, k))?;
        let deriv = eval.derivative(sys, &grid.direction(j))?;
        max_eig(&deriv)
    })?;
    let table: Vec<ProbeEntry> = cells
        .iter()
        .zip(&lambdas)
        .map(|(&(j, k), &lambda_max)| ProbeEntry {
            j: j + 1,
            k,
            lambda_max,
        })
        .collect();
    let lambda = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CriterionResult {
        grid,
        table,
        lambda,
        satisfied: lambda > 0.0,
        m: sys.m,
    })
}

/// Pointwise stability constant
/// `λ_x = min_j λ_max(F'(x)(e_j' − e_j))` at a single parameter `x`.
pub fn lambda_at_point(sys: &AssembledSystem, x: &[f64]) -> Result<f64> {
    let eval = ForwardEval::new(sys, x)?;
    let mut lambda = f64::INFINITY;
    for j in 0..sys.n {
        let mut d = vec![1.0; sys.n];
        d[j] = -1.0;
        let deriv = eval.derivative(sys, &d)?;
        lambda = lambda.min(max_eig(&deriv)?);
    }
    Ok(lambda)
}

/// Trace entry of an electrode-count search.
#[derive(Debug, Clone, Serialize)]
pub struct ElectrodeTrace {
    pub m: usize,
    pub k: usize,
    pub lambda: f64,
    pub satisfied: bool,
}

/// Result of searching for the smallest sufficient electrode count.
#[derive(Debug, Clone)]
pub struct ElectrodeSearch {
    /// Smallest `m ≤ m_max` with the criterion satisfied, if any.
    pub found: Option<usize>,
    /// `λ` per tested `m` (stops at the first satisfying `m`).
    pub trace: Vec<ElectrodeTrace>,
}

/// Searches `m = 2..=m_max` for the smallest electrode count satisfying the
/// criterion, rebuilding geometry, mesh and assembly per `m`.
pub fn min_electrodes(
    base: &crate::geometry::GeometryConfig,
    refinement: u32,
    sigma: &crate::assembly::Conductivity,
    a: f64,
    b: f64,
    c: f64,
    m_max: usize,
) -> Result<ElectrodeSearch> {
    if m_max < 2 {
        return Err(Error::Domain(format!("m_max must be at least 2, got {m_max}")));
    }
    let mut trace = Vec::new();
    for m in 2..=m_max {
        let cfg = crate::geometry::GeometryConfig {
            m,
            ..base.clone()
        };
        let geometry = crate::geometry::build_geometry(&cfg)?;
        let mesh = crate::mesh::generate_mesh(&geometry, refinement)?;
        let sys = crate::assembly::assemble(&mesh, &geometry, sigma)?;
        let crit = criterion_lambda(&sys, a, b, c)?;
        trace.push(ElectrodeTrace {
            m,
            k: crit.grid.k_max,
            lambda: crit.lambda,
            satisfied: crit.satisfied,
        });
        if crit.satisfied {
            return Ok(ElectrodeSearch {
                found: Some(m),
                trace,
            });
        }
    }
    Ok(ElectrodeSearch { found: None, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, Conductivity};
    use crate::geometry::{build_geometry, GeometryConfig};
    use crate::mesh::generate_mesh;
    use crate::numerics::SparseSym;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn system(n: usize, m: usize, refinement: u32) -> AssembledSystem {
        let g = build_geometry(&GeometryConfig::with_counts(n, m)).unwrap();
        let mesh = generate_mesh(&g, refinement).unwrap();
        assemble(&mesh, &g, &Conductivity::default()).unwrap()
    }

    /// Smallest K ≥ 2 with a + K·a/(4C) ≥ b + a/(4C), by brute force.
    fn brute_force_k(a: f64, b: f64, c: f64) -> usize {
        let mut k = 2usize;
        while a + k as f64 * a / (4.0 * c) < b + a / (4.0 * c) - 1e-12 {
            k += 1;
        }
        k
    }

    #[test]
    fn k_reproduces_closed_form_for_unit_scale() {
        // for C = 1 the closed form is max(⌈4b/a⌉ − 3, 2)
        let g = probe_grid(1.0, 3.0, 2, 1.0).unwrap();
        assert_eq!(g.k_max, 9);
        assert_eq!(((4.0f64 * 3.0).ceil() as isize - 3).max(2) as usize, 9);
        assert!(g.covers());
        for (a, b) in [(0.5, 2.0), (1.0, 10.0), (2.0, 3.0), (1.0, 1.1)] {
            let g = probe_grid(a, b, 3, 1.0).unwrap();
            assert_eq!(g.k_max, brute_force_k(a, b, 1.0), "a={a} b={b}");
            let closed = ((4.0 * b / a).ceil() as isize - 3).max(2) as usize;
            assert_eq!(g.k_max, closed, "a={a} b={b}");
        }
    }

    #[test]
    fn k_from_inequality_for_general_scale() {
        let g = probe_grid(1.0, 3.0, 3, 2.0).unwrap();
        assert_eq!(g.k_max, 17);
        // 1 + 17/8 = 3.125 ≥ 3 + 1/8, and K = 16 gives exactly 3 < 3.125
        assert!(1.0 + 16.0 / 8.0 < 3.0 + 1.0 / 8.0);
        for (a, b, c) in [(1.0, 3.0, 2.0), (0.7, 2.9, 4.0), (1.0, 3.0, 19.0)] {
            assert_eq!(probe_grid(a, b, 4, c).unwrap().k_max, brute_force_k(a, b, c));
        }
    }

    #[test]
    fn probe_points_match_formulas() {
        let g = probe_grid(1.0, 3.0, 2, 1.0).unwrap();
        assert_eq!(g.point(0, 2), vec![1.5, 0.5]);
        assert_eq!(g.direction(0), vec![-0.5, 5.0]);
        assert_eq!(g.point(1, 2), vec![0.5, 1.5]);
        assert_eq!(g.direction(1), vec![5.0, -0.5]);
    }

    #[test]
    fn invalid_bounds_rejected() {
        assert!(probe_grid(3.0, 1.0, 2, 1.0).is_err());
        assert!(probe_grid(0.0, 1.0, 2, 1.0).is_err());
        assert!(probe_grid(-1.0, 1.0, 2, 1.0).is_err());
        assert!(probe_grid(1.0, 3.0, 1, 1.0).is_err());
        assert!(probe_grid(1.0, 3.0, 2, 0.0).is_err());
    }

    #[test]
    fn small_setup_is_certified() {
        let sys = system(2, 4, 2);
        let crit = criterion_lambda(&sys, 1.0, 3.0, 1.0).unwrap();
        assert!(crit.satisfied, "lambda = {}", crit.lambda);
        assert!(crit.lambda > 0.0);
        assert_eq!(crit.table.len(), 2 * 8);
        // table minimum is lambda exactly
        let min = crit
            .table
            .iter()
            .map(|e| e.lambda_max)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, crit.lambda);
    }

    #[test]
    fn zeroed_interface_mass_fails_criterion() {
        let mut sys = system(2, 4, 1);
        for mass in &mut sys.interface_mass {
            *mass = SparseSym::from_triplets(sys.dof_count, &[]);
        }
        // rebuild is not needed: derivative uses interface_mass directly;
        // every probe entry becomes 0
        let crit = criterion_lambda(&sys, 1.0, 3.0, 1.0).unwrap();
        assert_eq!(crit.lambda, 0.0);
        assert!(!crit.satisfied);
    }

    #[test]
    fn pointwise_constant_uses_all_sign_patterns() {
        let sys = system(2, 4, 1);
        let eval_dirs = |x: &[f64]| {
            let eval = ForwardEval::new(&sys, x).unwrap();
            [
                max_eig(&eval.derivative(&sys, &[-1.0, 1.0]).unwrap()).unwrap(),
                max_eig(&eval.derivative(&sys, &[1.0, -1.0]).unwrap()).unwrap(),
            ]
        };
        let x = [2.0, 2.0];
        let both = eval_dirs(&x);
        let lam = lambda_at_point(&sys, &x).unwrap();
        assert_eq!(lam, both[0].min(both[1]));
    }

    #[test]
    fn pointwise_dominates_grid_lambda() {
        let sys = system(2, 4, 2);
        let crit = criterion_lambda(&sys, 1.0, 3.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..20 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(1.0..3.0)).collect();
            let lam_x = lambda_at_point(&sys, &x).unwrap();
            assert!(
                lam_x >= crit.lambda - 1e-10,
                "lambda_x = {lam_x} < lambda = {}",
                crit.lambda
            );
        }
    }

    #[test]
    fn shielding_at_large_coefficient() {
        let sys = system(2, 4, 1);
        let lam_a = lambda_at_point(&sys, &[1.0, 1.0]).unwrap();
        let lam_big = lambda_at_point(&sys, &[1e6, 1e6]).unwrap();
        assert!(
            lam_big <= 1e-3 * lam_a,
            "shielding: {lam_big} not well below {lam_a}"
        );
    }

    #[test]
    fn electrode_search_small_resolution() {
        let search = min_electrodes(
            &GeometryConfig::with_counts(2, 2),
            2,
            &Conductivity::default(),
            1.0,
            3.0,
            1.0,
            8,
        )
        .unwrap();
        let found = search.found.expect("n = 2 should be satisfied for m <= 8");
        assert!(found <= 8);
        assert_eq!(search.trace.last().unwrap().m, found);
        assert!(search.trace.last().unwrap().satisfied);
    }

    #[test]
    fn electrode_search_not_found_at_high_resolution() {
        let search = min_electrodes(
            &GeometryConfig::with_counts(20, 2),
            1,
            &Conductivity::default(),
            1.0,
            3.0,
            1.0,
            2,
        )
        .unwrap();
        assert!(search.found.is_none());
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let sys = system(2, 4, 1);
        let crit = criterion_lambda(&sys, 1.0, 3.0, 1.0).unwrap();
        let mut buf = Vec::new();
        crit.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("j,k,lambda_max"));
        assert_eq!(lines.count(), crit.table.len());
        let json = serde_json::to_string(&crit.summary()).unwrap();
        assert!(json.contains("\"lambda\""));
        assert!(json.contains("\"satisfied\""));
    }
}
