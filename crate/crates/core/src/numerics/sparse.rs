//! Sparse symmetric matrices and a skyline (envelope) Cholesky factorization.
//!
//! Matrices are stored as the lower triangle in CSR form. The mesh numbering
//! used by assembly keeps every row's envelope narrow, so an envelope
//! factorization with the identity ordering is both simple and fast, and it
//! is deterministic by construction (no fill-reducing heuristics).

use crate::{Error, Result};
use nalgebra::DMatrix;

/// Symmetric sparse matrix; only entries with `col <= row` are stored.
#[derive(Debug, Clone)]
pub struct SparseSym {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSym {
    /// Builds from `(row, col, value)` triplets. Entries are mirrored onto
    /// the lower triangle and duplicates are summed.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for &(i, j, v) in triplets {
            let (r, c) = if i >= j { (i, j) } else { (j, i) };
            assert!(r < dim, "triplet index {r} out of range for dim {dim}");
            per_row[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for &(c, v) in row.iter() {
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseSym {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored entries (lower triangle only).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates stored `(row, col, value)` entries of the lower triangle.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }

    /// Entry `(i, j)`; zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(off) => self.values[range.start + off],
            Err(_) => 0.0,
        }
    }

    /// `y = M x` using the full symmetric matrix.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.fill(0.0);
        for i in 0..self.dim {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[p];
                let v = self.values[p];
                y[i] += v * x[j];
                if i != j {
                    y[j] += v * x[i];
                }
            }
        }
    }

    /// Quadratic form `uᵀ M v`.
    pub fn quad_form(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[p];
                let w = self.values[p];
                acc += w * u[i] * v[j];
                if i != j {
                    acc += w * u[j] * v[i];
                }
            }
        }
        acc
    }

    /// Row indices that carry at least one stored entry (as row or column).
    pub fn support(&self) -> Vec<usize> {
        let mut mark = vec![false; self.dim];
        for (i, j, v) in self.iter() {
            if v != 0.0 {
                mark[i] = true;
                mark[j] = true;
            }
        }
        (0..self.dim).filter(|&i| mark[i]).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// Frobenius norm of the full symmetric matrix.
    pub fn norm_frobenius(&self) -> f64 {
        let mut acc = 0.0;
        for (i, j, v) in self.iter() {
            acc += if i == j { v * v } else { 2.0 * v * v };
        }
        acc.sqrt()
    }
}

/// Affine matrix family `base + Σ coeffᵢ · termᵢ` over a fixed pattern.
///
/// The pattern is the one of `base`; every term's pattern must be contained
/// in it. Evaluation is a copy plus a few scatter-adds, which keeps repeated
/// evaluations (one per probe point or per Newton step) cheap.
#[derive(Debug, Clone)]
pub struct LinearCombo {
    base: SparseSym,
    /// Per term: (slot in base.values, term value).
    term_slots: Vec<Vec<(usize, f64)>>,
}

impl LinearCombo {
    /// `base` fixes the pattern; each term must fit inside it.
    pub fn new(base: SparseSym, terms: &[&SparseSym]) -> Result<Self> {
        let mut term_slots = Vec::with_capacity(terms.len());
        for (t_idx, term) in terms.iter().enumerate() {
            let mut slots = Vec::with_capacity(term.nnz());
            for (i, j, v) in term.iter() {
                let range = base.row_ptr[i]..base.row_ptr[i + 1];
                let off = base.col_idx[range.clone()].binary_search(&j).map_err(|_| {
                    Error::Domain(format!(
                        "term {t_idx} entry ({i},{j}) outside the base pattern"
                    ))
                })?;
                slots.push((range.start + off, v));
            }
            term_slots.push(slots);
        }
        Ok(LinearCombo { base, term_slots })
    }

    pub fn term_count(&self) -> usize {
        self.term_slots.len()
    }

    pub fn dim(&self) -> usize {
        self.base.dim
    }

    /// Evaluates `base + Σ coeffᵢ termᵢ`.
    pub fn evaluate(&self, coeffs: &[f64]) -> SparseSym {
        assert_eq!(coeffs.len(), self.term_slots.len());
        let mut out = self.base.clone();
        for (slots, &c) in self.term_slots.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            for &(slot, v) in slots {
                out.values[slot] += c * v;
            }
        }
        out
    }
}

/// Skyline Cholesky factor of a sparse symmetric positive definite matrix.
///
/// Row `i` of the factor is stored densely over its envelope
/// `first[i]..=i`; fill-in never escapes the envelope.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    dim: usize,
    first: Vec<usize>,
    row_start: Vec<usize>,
    data: Vec<f64>,
    logdet: f64,
}

/// Factorizes a sparse symmetric matrix, failing with
/// [`Error::NotPositiveDefinite`] at the first non-positive pivot.
pub fn spd_factorize(a: &SparseSym) -> Result<SpdFactor> {
    let n = a.dim;
    let mut first = Vec::with_capacity(n);
    for i in 0..n {
        let lo = a.row_ptr[i];
        let hi = a.row_ptr[i + 1];
        let f = if lo == hi { i } else { a.col_idx[lo].min(i) };
        first.push(f);
    }
    let mut row_start = Vec::with_capacity(n + 1);
    row_start.push(0usize);
    for i in 0..n {
        row_start.push(row_start[i] + (i - first[i] + 1));
    }
    let mut data = vec![0.0; row_start[n]];
    for i in 0..n {
        for p in a.row_ptr[i]..a.row_ptr[i + 1] {
            let j = a.col_idx[p];
            data[row_start[i] + (j - first[i])] = a.values[p];
        }
    }

    // In-place envelope factorization (row-oriented LLᵀ); the inner products
    // run over contiguous row segments so they vectorize.
    let mut logdet = 0.0;
    for i in 0..n {
        let fi = first[i];
        let (done, row_i) = data.split_at_mut(row_start[i]);
        let row_i = &mut row_i[..i - fi + 1];
        for j in fi..i {
            let fj = first[j];
            let lo = fi.max(fj);
            let row_j = &done[row_start[j]..row_start[j + 1]];
            let dot: f64 = row_i[lo - fi..j - fi]
                .iter()
                .zip(&row_j[lo - fj..j - fj])
                .map(|(a, b)| a * b)
                .sum();
            row_i[j - fi] = (row_i[j - fi] - dot) / row_j[j - fj];
        }
        let sq: f64 = row_i[..i - fi].iter().map(|l| l * l).sum();
        let d = row_i[i - fi] - sq;
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: i });
        }
        let l = d.sqrt();
        row_i[i - fi] = l;
        logdet += 2.0 * l.ln();
    }

    Ok(SpdFactor {
        dim: n,
        first,
        row_start,
        data,
        logdet,
    })
}

impl SpdFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `log det A` of the factorized matrix.
    pub fn logdet(&self) -> f64 {
        self.logdet
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> f64 {
        self.data[self.row_start[i] + (j - self.first[i])]
    }

    /// Forward substitution `L y = x`, skipping rows before `from` (valid
    /// when `x` vanishes there).
    fn forward_from(&self, x: &mut [f64], from: usize) {
        for i in from..self.dim {
            let fi = self.first[i].max(from);
            let row = &self.data[self.row_start[i]..self.row_start[i + 1]];
            let off = self.first[i];
            let dot: f64 = row[fi - off..i - off]
                .iter()
                .zip(&x[fi..i])
                .map(|(a, b)| a * b)
                .sum();
            x[i] = (x[i] - dot) / row[i - off];
        }
    }

    /// Backward substitution `Lᵀ x = y` (column sweep over rows).
    fn backward(&self, x: &mut [f64]) {
        for i in (0..self.dim).rev() {
            let row = &self.data[self.row_start[i]..self.row_start[i + 1]];
            let off = self.first[i];
            let xi = x[i] / row[i - off];
            x[i] = xi;
            for (l, xk) in row[..i - off].iter().zip(&mut x[off..i]) {
                *xk -= l * xi;
            }
        }
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        self.forward_from(x, 0);
        self.backward(x);
    }

    /// Solves `A x = e_p` for a unit right-hand side; the forward sweep
    /// starts at row `p` because earlier rows stay zero.
    pub fn solve_unit(&self, p: usize) -> Vec<f64> {
        assert!(p < self.dim);
        let mut x = vec![0.0; self.dim];
        x[p] = 1.0;
        self.forward_from(&mut x, p);
        self.backward(&mut x);
        x
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves for every column of a dense right-hand side.
    pub fn solve_mat(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(rhs.nrows(), self.dim);
        let mut out = rhs.clone();
        for c in 0..rhs.ncols() {
            let mut col: Vec<f64> = out.column(c).iter().copied().collect();
            self.solve_in_place(&mut col);
            out.set_column(c, &nalgebra::DVector::from_vec(col));
        }
        out
    }

    /// For the block matrix `[[A, B],[Bᵀ, C]]` factored as a whole, returns
    /// the Schur complement `C − Bᵀ A⁻¹ B` of the leading block, which equals
    /// `L₂₂ L₂₂ᵀ` for the trailing `size × size` factor block.
    pub fn trailing_schur(&self, size: usize) -> DMatrix<f64> {
        assert!(size <= self.dim);
        let off = self.dim - size;
        let mut l22 = DMatrix::zeros(size, size);
        for i in off..self.dim {
            let fi = self.first[i].max(off);
            for j in fi..=i {
                l22[(i - off, j - off)] = self.l(i, j);
            }
        }
        &l22 * l22.transpose()
    }
}
