//! Measurement operator `F(γ) = Pᵀ A(γ)⁻¹ P`, its directional derivative,
//! and the monotonicity/convexity diagnostics.
//!
//! `F(γ)` maps applied electrode currents to measured electrode voltages; it
//! is symmetric positive definite, monotonically non-increasing and convex in
//! the Loewner order. The derivative in direction `δ` is
//! `F'(γ)δ = −Σᵢ δᵢ Wᵀ Bᵢ W` with `W = A(γ)⁻¹ P`.
//!
//! [`ForwardEval`] factorizes `A(γ)` once and reuses `W` for the measurement
//! and any number of directional derivatives at the same `γ`; the certifier
//! evaluates many directions per probe point. Every returned matrix is
//! explicitly symmetrized so that eigenvalue tests see exact symmetry.

use crate::assembly::AssembledSystem;
use crate::numerics::{spd_factorize, SpdFactor};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Robin transmission coefficient: one positive value per partition arc.
#[derive(Debug, Clone, PartialEq)]
pub struct RobinParam {
    values: Vec<f64>,
}

impl RobinParam {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("robin coefficient must not be empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain(format!(
                "robin coefficient component {i} = {} is not positive",
                values[i]
            )));
        }
        Ok(RobinParam { values })
    }

    /// Constant coefficient `value` on every arc.
    pub fn constant(n: usize, value: f64) -> Result<Self> {
        RobinParam::new(vec![value; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// True when every component lies in `[a, b]`.
    pub fn within_bounds(&self, a: f64, b: f64) -> bool {
        self.values.iter().all(|&v| v >= a && v <= b)
    }
}

impl std::ops::Deref for RobinParam {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// Factorization of `A(γ)` together with `W = A(γ)⁻¹ P`.
pub struct ForwardEval {
    gamma: Vec<f64>,
    factor: SpdFactor,
    w: DMatrix<f64>,
}

impl ForwardEval {
    pub fn new(sys: &AssembledSystem, gamma: &[f64]) -> Result<Self> {
        let a = sys.system_matrix(gamma)?;
        let factor = spd_factorize(&a)?;
        let mut w = DMatrix::zeros(sys.dof_count, sys.m);
        let mut col = vec![0.0; sys.dof_count];
        for (k, &d) in sys.electrode_dofs.iter().enumerate() {
            col.fill(0.0);
            col[d] = 1.0;
            factor.solve_in_place(&mut col);
            w.set_column(k, &nalgebra::DVector::from_column_slice(&col));
        }
        Ok(ForwardEval {
            gamma: gamma.to_vec(),
            factor,
            w,
        })
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn factor(&self) -> &SpdFactor {
        &self.factor
    }

    /// `W = A(γ)⁻¹ P` (one column per electrode).
    pub fn potentials(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// Measurement matrix `F(γ) = Pᵀ W`, symmetrized.
    pub fn measurement(&self, sys: &AssembledSystem) -> DMatrix<f64> {
        let m = sys.m;
        let mut f = DMatrix::zeros(m, m);
        for (r, &d) in sys.electrode_dofs.iter().enumerate() {
            for c in 0..m {
                f[(r, c)] = self.w[(d, c)];
            }
        }
        symmetrize(&mut f);
        f
    }

    /// Directional derivative `F'(γ)δ = −Σᵢ δᵢ Wᵀ Bᵢ W`, exactly symmetric.
    pub fn derivative(&self, sys: &AssembledSystem, delta: &[f64]) -> Result<DMatrix<f64>> {
        if delta.len() != sys.n {
            return Err(Error::Domain(format!(
                "direction has {} components, system has n = {}",
                delta.len(),
                sys.n
            )));
        }
        let m = sys.m;
        let mut out = DMatrix::zeros(m, m);
        for (i, mass) in sys.interface_mass.iter().enumerate() {
            let di = delta[i];
            if di == 0.0 {
                continue;
            }
            for (p, q, v) in mass.iter() {
                let s = -di * v;
                if p == q {
                    for r in 0..m {
                        let wp_r = self.w[(p, r)];
                        for c in 0..=r {
                            out[(r, c)] += s * wp_r * self.w[(p, c)];
                        }
                    }
                } else {
                    for r in 0..m {
                        let wp_r = self.w[(p, r)];
                        let wq_r = self.w[(q, r)];
                        for c in 0..=r {
                            out[(r, c)] += s * (wp_r * self.w[(q, c)] + wq_r * self.w[(p, c)]);
                        }
                    }
                }
            }
        }
        for r in 0..m {
            for c in 0..r {
                out[(c, r)] = out[(r, c)];
            }
        }
        Ok(out)
    }

    /// Gram matrices `Gᵢ = Wᵀ Bᵢ W` for all arcs (so `F'(γ)δ = −Σ δᵢ Gᵢ`).
    pub fn arc_grams(&self, sys: &AssembledSystem) -> Vec<DMatrix<f64>> {
        let m = sys.m;
        sys.interface_mass
            .iter()
            .map(|mass| {
                let mut g = DMatrix::zeros(m, m);
                for (p, q, v) in mass.iter() {
                    if p == q {
                        for r in 0..m {
                            let wp_r = self.w[(p, r)];
                            for c in 0..=r {
                                g[(r, c)] += v * wp_r * self.w[(p, c)];
                            }
                        }
                    } else {
                        for r in 0..m {
                            let wp_r = self.w[(p, r)];
                            let wq_r = self.w[(q, r)];
                            for c in 0..=r {
                                g[(r, c)] += v * (wp_r * self.w[(q, c)] + wq_r * self.w[(p, c)]);
                            }
                        }
                    }
                }
                for r in 0..m {
                    for c in 0..r {
                        g[(c, r)] = g[(r, c)];
                    }
                }
                g
            })
            .collect()
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    for r in 0..m.nrows() {
        for c in 0..r {
            let v = 0.5 * (m[(r, c)] + m[(c, r)]);
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
}

/// Solves the forward problem for applied currents: `A(γ) u = P I`.
/// Returns the DOF vector and the electrode voltages `U = Pᵀ u`.
pub fn solve_forward(
    sys: &AssembledSystem,
    gamma: &RobinParam,
    currents: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if currents.len() != sys.m {
        return Err(Error::Domain(format!(
            "current vector has {} components, system has m = {}",
            currents.len(),
            sys.m
        )));
    }
    let a = sys.system_matrix(gamma.as_slice())?;
    let factor = spd_factorize(&a)?;
    let mut u = vec![0.0; sys.dof_count];
    for (k, &d) in sys.electrode_dofs.iter().enumerate() {
        u[d] = currents[k];
    }
    factor.solve_in_place(&mut u);
    let voltages: Vec<f64> = sys.electrode_dofs.iter().map(|&d| u[d]).collect();
    Ok((u, voltages))
}

/// Measurement matrix `F(γ)`.
pub fn measure(sys: &AssembledSystem, gamma: &RobinParam) -> Result<DMatrix<f64>> {
    Ok(ForwardEval::new(sys, gamma.as_slice())?.measurement(sys))
}

/// Directional derivative `F'(γ)δ`.
pub fn derivative_apply(
    sys: &AssembledSystem,
    gamma: &RobinParam,
    delta: &[f64],
) -> Result<DMatrix<f64>> {
    ForwardEval::new(sys, gamma.as_slice())?.derivative(sys, delta)
}

/// Convexity gap `F(γ) − F(γ⁰) − F'(γ⁰)(γ − γ⁰)`; positive semidefinite for
/// a convex measurement map.
pub fn convexity_gap(
    sys: &AssembledSystem,
    gamma: &RobinParam,
    gamma0: &RobinParam,
) -> Result<DMatrix<f64>> {
    if gamma.len() != gamma0.len() {
        return Err(Error::Domain("parameter dimensions differ".into()));
    }
    let f1 = measure(sys, gamma)?;
    let eval0 = ForwardEval::new(sys, gamma0.as_slice())?;
    let f0 = eval0.measurement(sys);
    let diff: Vec<f64> = gamma
        .iter()
        .zip(gamma0.iter())
        .map(|(a, b)| a - b)
        .collect();
    let deriv = eval0.derivative(sys, &diff)?;
    let mut gap = f1 - f0 - deriv;
    symmetrize(&mut gap);
    Ok(gap)
}

/// Reads a plain-text `m × m` measurement table (row-major, whitespace
/// separated, `#` comments allowed).
pub fn read_measurement<R: std::io::BufRead>(r: &mut R) -> Result<DMatrix<f64>> {
    let mut values: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    let mut cols: Option<usize> = None;
    let mut line = String::new();
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            break;
        }
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let row: Vec<f64> = body
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad measurement entry: {t}")))
            })
            .collect::<Result<_>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::Parse(format!(
                    "measurement row {} has {} entries, expected {c}",
                    rows + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("empty measurement file".into()))?;
    if rows != cols {
        return Err(Error::Parse(format!(
            "measurement table is {rows} x {cols}, expected square"
        )));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

/// Writes a measurement matrix as a plain-text row-major table.
pub fn write_measurement<W: std::io::Write>(w: &mut W, m: &DMatrix<f64>) -> std::io::Result<()> {
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:e}", m[(r, c)])).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}
