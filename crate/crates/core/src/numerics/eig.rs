//! Dense symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! The matrices diagonalized here are electrode-sized (m ≤ 64), where Jacobi
//! is robust and plenty fast. Eigenvalues are returned in ascending order
//! with matching orthonormal eigenvector columns.

use crate::{Error, Result};
use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors; column `i` pairs with `values[i]`.
    pub vectors: DMatrix<f64>,
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Domain(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax();
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if worst > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!(
            "matrix is not symmetric: max asymmetry {worst:.3e} exceeds 1e-12 * {scale:.3e}"
        )));
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric matrix.
pub fn eig_sym(m: &DMatrix<f64>) -> Result<SymEigen> {
    check_symmetric(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let mut a = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm = a.norm().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * norm;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[(q, q)] - a[(p, p)]) / apq;
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = a[(p, p)];
                let aqq = a[(q, q)];
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp - s * (arq + tau * arp);
                    a[(p, r)] = a[(r, p)];
                    a[(r, q)] = arq + s * (arp - tau * arq);
                    a[(q, r)] = a[(r, q)];
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp - s * (vrq + tau * vrp);
                    v[(r, q)] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src).into_owned());
    }
    Ok(SymEigen { values, vectors })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eig(m: &DMatrix<f64>) -> Result<f64> {
    Ok(*eig_sym(m)?
        .values
        .first()
        .ok_or_else(|| Error::Domain("empty matrix".into()))?)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eig(m: &DMatrix<f64>) -> Result<f64> {
    Ok(*eig_sym(m)?
        .values
        .last()
        .ok_or_else(|| Error::Domain("empty matrix".into()))?)
}

/// Spectral norm of a symmetric matrix (largest absolute eigenvalue).
pub fn spectral_norm_sym(m: &DMatrix<f64>) -> Result<f64> {
    let e = eig_sym(m)?;
    Ok(e.values
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs())))
}
