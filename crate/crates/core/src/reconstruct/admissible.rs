//! Sampling of the admissible set `{γ ∈ [a,b]² : F(γ) ⪯ Y + δI}` on a
//! regular grid, for the two-arc visualization experiments.

use crate::assembly::AssembledSystem;
use crate::exec;
use crate::forward::ForwardEval;
use crate::numerics::{min_eig, spectral_norm_sym};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Boolean admissibility grid over `[a, b]²`.
#[derive(Debug, Clone)]
pub struct AdmissibleGrid {
    pub a: f64,
    pub b: f64,
    pub resolution: usize,
    pub delta: f64,
    /// Row-major over `(i1, i2)`: index `i1 * resolution + i2`.
    pub cells: Vec<bool>,
}

impl AdmissibleGrid {
    /// Grid coordinate of index `i` (endpoints included).
    pub fn coordinate(&self, i: usize) -> f64 {
        self.a + (self.b - self.a) * i as f64 / (self.resolution - 1) as f64
    }

    pub fn cell(&self, i1: usize, i2: usize) -> bool {
        self.cells[i1 * self.resolution + i2]
    }
}

/// Samples admissibility of `F(γ) ⪯ y_target + δI` over the grid.
/// Requires a two-arc system (`n = 2`).
pub fn admissible_set_sample(
    sys: &AssembledSystem,
    y_target: &DMatrix<f64>,
    delta: f64,
    a: f64,
    b: f64,
    resolution: usize,
) -> Result<AdmissibleGrid> {
    if sys.n != 2 {
        return Err(Error::Domain(format!(
            "admissible-set sampling needs n = 2, system has n = {}",
            sys.n
        )));
    }
    if resolution < 2 {
        return Err(Error::Domain(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::Domain(format!("delta must be >= 0, got {delta}")));
    }
    if !(a > 0.0 && a < b) {
        return Err(Error::Domain(format!("bounds must satisfy 0 < a < b, got {a}, {b}")));
    }
    let m = sys.m;
    if y_target.nrows() != m || y_target.ncols() != m {
        return Err(Error::Domain(format!(
            "target is {}x{}, system has m = {m}",
            y_target.nrows(),
            y_target.ncols()
        )));
    }
    let lifted = y_target + DMatrix::identity(m, m) * delta;
    let tol = 1e-9 * (1.0 + spectral_norm_sym(&DMatrix::from_fn(m, m, |r, c| {
        0.5 * (lifted[(r, c)] + lifted[(c, r)])
    }))?);

    let coord = |i: usize| a + (b - a) * i as f64 / (resolution - 1) as f64;
    let cells = exec::try_map_indexed(resolution * resolution, |idx| {
        let gamma = [coord(idx / resolution), coord(idx % resolution)];
        let f = ForwardEval::new(sys, &gamma)?.measurement(sys);
        let gap = &lifted - f;
        let sym = DMatrix::from_fn(m, m, |r, c| 0.5 * (gap[(r, c)] + gap[(c, r)]));
        Ok::<bool, Error>(min_eig(&sym)? >= -tol)
    })?;

    Ok(AdmissibleGrid {
        a,
        b,
        resolution,
        delta,
        cells,
    })
}
