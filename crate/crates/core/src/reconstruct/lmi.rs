//! Exact linear matrix inequality embedding of the measurement constraint.
//!
//! For a target `Ŷ` the nonlinear constraint `F(γ) ⪯ Ŷ` is equivalent to
//! positive semidefiniteness of the block matrix
//!
//! ```text
//! M(γ) = [[ A(γ), P ],
//!         [ Pᵀ,  Ŷ ]]
//! ```
//!
//! because `Ŷ − Pᵀ A(γ)⁻¹ P` is the Schur complement of `A(γ)` in `M(γ)` and
//! `A(γ)` is positive definite. `M(γ)` is affine in `γ`, which turns the
//! convex reconstruction program into a linear semidefinite program.

use crate::assembly::AssembledSystem;
use crate::numerics::{spd_factorize, LinearCombo, SparseSym, SpdFactor};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Affine LMI family `M(γ) + slack·E_tail + shift·I` over the block pattern.
pub struct LmiProblem<'a> {
    pub sys: &'a AssembledSystem,
    /// Symmetrized target `Ŷ`.
    pub target: DMatrix<f64>,
    combo: LinearCombo,
    dim: usize,
}

/// Builds the block embedding for a symmetric `m × m` target.
pub fn schur_embed<'a>(
    sys: &'a AssembledSystem,
    target: &DMatrix<f64>,
) -> Result<LmiProblem<'a>> {
    let m = sys.m;
    if target.nrows() != m || target.ncols() != m {
        return Err(Error::Domain(format!(
            "target is {}x{}, system has m = {m}",
            target.nrows(),
            target.ncols()
        )));
    }
    let scale = target.amax().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for r in 0..m {
        for c in 0..r {
            worst = worst.max((target[(r, c)] - target[(c, r)]).abs());
        }
    }
    if worst > 1e-10 * scale {
        return Err(Error::Domain(format!(
            "target is not symmetric: asymmetry {worst:.3e}"
        )));
    }
    let target = DMatrix::from_fn(m, m, |r, c| 0.5 * (target[(r, c)] + target[(c, r)]));

    let d = sys.dof_count;
    let dim = d + m;
    let mut base_trips: Vec<(usize, usize, f64)> =
        sys.stiffness.iter().collect();
    for (k, &dof) in sys.electrode_dofs.iter().enumerate() {
        base_trips.push((d + k, dof, 1.0));
    }
    for r in 0..m {
        for c in 0..=r {
            base_trips.push((d + r, d + c, target[(r, c)]));
        }
    }
    let base = SparseSym::from_triplets(dim, &base_trips);

    // Terms: the interface mass matrices (pattern inside the stiffness
    // block), the tail identity carrying the feasibility slack, and a full
    // identity used for eigenvalue sign tests by shifted factorizations.
    let mut terms: Vec<SparseSym> = sys
        .interface_mass
        .iter()
        .map(|mass| {
            let trips: Vec<(usize, usize, f64)> = mass.iter().collect();
            SparseSym::from_triplets(dim, &trips)
        })
        .collect();
    let tail: Vec<(usize, usize, f64)> = (0..m).map(|k| (d + k, d + k, 1.0)).collect();
    terms.push(SparseSym::from_triplets(dim, &tail));
    let full: Vec<(usize, usize, f64)> = (0..dim).map(|i| (i, i, 1.0)).collect();
    terms.push(SparseSym::from_triplets(dim, &full));

    let refs: Vec<&SparseSym> = terms.iter().collect();
    let combo = LinearCombo::new(base, &refs)?;
    Ok(LmiProblem {
        sys,
        target,
        combo,
        dim,
    })
}

impl<'a> LmiProblem<'a> {
    /// Block dimension `D + m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn coeffs(&self, gamma: &[f64], slack: f64, shift: f64) -> Result<Vec<f64>> {
        if gamma.len() != self.sys.n {
            return Err(Error::Domain(format!(
                "gamma has {} components, system has n = {}",
                gamma.len(),
                self.sys.n
            )));
        }
        let mut coeffs = Vec::with_capacity(gamma.len() + 2);
        coeffs.extend_from_slice(gamma);
        coeffs.push(slack);
        coeffs.push(shift);
        Ok(coeffs)
    }

    /// `M(γ) + slack·diag(0, I_m) + shift·I`.
    pub fn matrix(&self, gamma: &[f64], slack: f64, shift: f64) -> Result<SparseSym> {
        Ok(self.combo.evaluate(&self.coeffs(gamma, slack, shift)?))
    }

    /// Cholesky of the shifted LMI matrix; failure doubles as a
    /// definiteness test.
    pub fn factorize(&self, gamma: &[f64], slack: f64, shift: f64) -> Result<SpdFactor> {
        spd_factorize(&self.matrix(gamma, slack, shift)?)
    }

    /// Sign of the smallest eigenvalue of the (slack-lifted) LMI matrix with
    /// a dead band: `+1` when it exceeds `tol`, `0` within `±tol`, `−1`
    /// below `−tol`. Decided by two shifted factorization attempts.
    pub fn sign_class(&self, gamma: &[f64], slack: f64, tol: f64) -> Result<i8> {
        if self.factorize(gamma, slack, -tol).is_ok() {
            Ok(1)
        } else if self.factorize(gamma, slack, tol).is_ok() {
            Ok(0)
        } else {
            Ok(-1)
        }
    }
}

/// Sign with a dead band, for comparing against [`LmiProblem::sign_class`].
pub fn sign_with_band(value: f64, tol: f64) -> i8 {
    if value > tol {
        1
    } else if value < -tol {
        -1
    } else {
        0
    }
}
