//! Sparse complex operators and the small amount of dense glue the engines
//! need on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix in compressed sparse row storage.
///
/// Hamiltonians and projectors are built in this form; gates on small
/// subsystems are materialized into it only when a full-space operator is
/// requested.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl LinearOperator {
    /// Builds an operator from `(row, col, value)` triplets. Duplicates are
    /// summed and exact zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside dimension {dim}");
            if let (Some(&lr), Some(&lc)) = (rows.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            col_idx.push(c);
            values.push(v);
        }
        // drop entries that cancelled
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_cols = Vec::with_capacity(rows.len());
        let mut keep_vals = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != ZERO {
                keep_rows.push(r);
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for &r in &keep_rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            col_idx: keep_cols,
            values: keep_vals,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![ONE; dim])
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let trip = diag
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, v))
            .collect();
        Self::from_triplets(diag.len(), trip)
    }

    /// Sparse copy of a dense matrix, keeping entries with modulus above `tol`.
    pub fn from_dense(m: &DMatrix<C64>, tol: f64) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator must be square");
        let mut trip = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v.norm() > tol {
                    trip.push((r, c, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), trip)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over stored `(row, col, value)` entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.dim];
        self.apply_into(x, &mut y);
        y
    }

    /// `y = self * x`.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yr = acc;
        }
    }

    /// `⟨x|self|x⟩`
    pub fn expectation(&self, x: &[C64]) -> C64 {
        let y = self.apply(x);
        dot(x, &y)
    }

    pub fn adjoint(&self) -> Self {
        let trip = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.dim, trip)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let trip = self.iter().chain(other.iter()).collect();
        Self::from_triplets(self.dim, trip)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut trip = Vec::new();
        for (r, k, a) in self.iter() {
            for idx in other.row_ptr[k]..other.row_ptr[k + 1] {
                trip.push((r, other.col_idx[idx], a * other.values[idx]));
            }
        }
        Self::from_triplets(self.dim, trip)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the outer (slow) factor.
    pub fn kron(&self, other: &Self) -> Self {
        let d = other.dim;
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, a) in self.iter() {
            for (r2, c2, b) in other.iter() {
                trip.push((r1 * d + r2, c1 * d + c2, a * b));
            }
        }
        Self::from_triplets(self.dim * d, trip)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `H − H†`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Diagonal entries, if the operator has no off-diagonal support.
    pub fn as_diagonal(&self) -> Option<Vec<C64>> {
        let mut d = vec![ZERO; self.dim];
        for (r, c, v) in self.iter() {
            if r != c {
                return None;
            }
            d[r] = v;
        }
        Some(d)
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.values[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// `⟨a|b⟩` with conjugation on the left argument.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += s * x`
pub fn axpy(s: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Hermitian matrix function `f(A)` via eigendecomposition.
pub fn hermitian_function(a: &DMatrix<C64>, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
    let eig = a.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let fj = f(lam);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= fj);
    }
    scaled * v.adjoint()
}

/// `exp(-i H t)` of a dense Hermitian matrix.
pub fn expm_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    hermitian_function(h, |lam| C64::from_polar(1.0, -lam * t))
}

/// Largest entry modulus of `U†U − 1`.
pub fn unitarity_residual(u: &DMatrix<C64>) -> f64 {
    let prod = u.adjoint() * u;
    let n = u.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((prod[(r, c)] - target).norm());
        }
    }
    worst
}

pub fn max_abs_dense(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Spectral norm of a dense matrix.
pub fn operator_norm(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_and_cancel() {
        let op = LinearOperator::from_triplets(
            3,
            vec![
                (0, 1, ONE),
                (0, 1, ONE),
                (2, 2, ONE),
                (2, 2, -ONE),
                (1, 0, I),
            ],
        );
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(0, 1), C64::new(2.0, 0.0));
        assert_eq!(op.get(2, 2), ZERO);
        assert_eq!(op.get(1, 0), I);
    }

    #[test]
    fn kron_matches_dense() {
        let a = LinearOperator::from_triplets(2, vec![(0, 1, ONE), (1, 0, I)]);
        let b = LinearOperator::diagonal(&[ONE, -ONE, C64::new(2.0, 0.0)]);
        let k = a.kron(&b).to_dense();
        let ad = a.to_dense();
        let bd = b.to_dense();
        let reference = ad.kronecker(&bd);
        assert!(max_abs_dense(&(k - reference)) < 1e-15);
    }

    #[test]
    fn matmul_and_adjoint_agree_with_dense() {
        let a = LinearOperator::from_triplets(
            3,
            vec![(0, 1, C64::new(1.0, 2.0)), (2, 0, ONE), (1, 1, -I)],
        );
        let b = LinearOperator::from_triplets(3, vec![(1, 2, ONE), (0, 0, C64::new(0.5, 0.0))]);
        let prod = a.matmul(&b).to_dense();
        assert!(max_abs_dense(&(prod - a.to_dense() * b.to_dense())) < 1e-15);
        assert!(max_abs_dense(&(a.adjoint().to_dense() - a.to_dense().adjoint())) < 1e-15);
    }

    #[test]
    fn expm_of_pauli_x() {
        let x = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let u = expm_hermitian(&x, 0.3);
        assert!((u[(0, 0)] - C64::new(0.3f64.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(1, 0)] - C64::new(0.0, -(0.3f64.sin()))).norm() < 1e-14);
        assert!(unitarity_residual(&u) < 1e-14);
    }
}
