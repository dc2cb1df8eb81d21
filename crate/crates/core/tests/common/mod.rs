//! Shared helpers and independent oracles for the integration suites.
//!
//! The oracles here deliberately avoid the library's sparse/skyline code
//! paths: dense Gauss-Jordan inversion for the measurement map, direct
//! eigenvalue work through the public API only where the contract under
//! test is not the eigensolver itself.

use corrocert::assembly::{assemble, AssembledSystem, Conductivity};
use corrocert::geometry::{build_geometry, GeometryConfig};
use corrocert::mesh::generate_mesh;
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn build_system(n: usize, m: usize, refinement: u32) -> AssembledSystem {
    let cfg = GeometryConfig::with_counts(n, m);
    let geometry = build_geometry(&cfg).unwrap();
    let mesh = generate_mesh(&geometry, refinement).unwrap();
    assemble(&mesh, &geometry, &Conductivity::default()).unwrap()
}

/// Dense matrix inverse by Gauss-Jordan elimination with partial pivoting;
/// independent of the skyline factorization used by the library.
pub fn gauss_jordan_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut work = a.clone();
    let mut inv = DMatrix::<f64>::identity(n, n);
    for col in 0..n {
        let mut pivot = col;
        for r in col + 1..n {
            if work[(r, col)].abs() > work[(pivot, col)].abs() {
                pivot = r;
            }
        }
        assert!(work[(pivot, col)].abs() > 0.0, "singular matrix in oracle");
        if pivot != col {
            work.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
        }
        let p = work[(col, col)];
        for c in 0..n {
            work[(col, c)] /= p;
            inv[(col, c)] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = work[(r, col)];
            if f == 0.0 {
                continue;
            }
            for c in 0..n {
                work[(r, c)] -= f * work[(col, c)];
                inv[(r, c)] -= f * inv[(col, c)];
            }
        }
    }
    inv
}

/// Measurement matrix through the dense-inverse oracle.
pub fn measure_dense_oracle(sys: &AssembledSystem, gamma: &[f64]) -> DMatrix<f64> {
    let a = sys.system_matrix(gamma).unwrap().to_dense();
    let inv = gauss_jordan_inverse(&a);
    let m = sys.m;
    let mut f = DMatrix::zeros(m, m);
    for (r, &dr) in sys.electrode_dofs.iter().enumerate() {
        for (c, &dc) in sys.electrode_dofs.iter().enumerate() {
            f[(r, c)] = inv[(dr, dc)];
        }
    }
    f
}

pub fn seeded_gamma(rng: &mut ChaCha8Rng, n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(a..b)).collect()
}

pub fn err_inf(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

pub fn err_2(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}
