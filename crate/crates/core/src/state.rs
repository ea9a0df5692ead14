use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, LinearOperator, C64};

/// Pure state over the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState(Vec<C64>);

impl QuantumState {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        Self(amplitudes)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.0.iter_mut().for_each(|a| *a /= n);
        self
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C64 {
        linalg::dot(&self.0, &other.0)
    }

    pub fn expectation(&self, op: &LinearOperator) -> f64 {
        op.expectation(&self.0).re
    }

    /// Phase-insensitive distance `min_φ ‖ψ − e^{iφ}φ‖`.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let overlap = self.inner(other).norm();
        (self.norm().powi(2) + other.norm().powi(2) - 2.0 * overlap).max(0.0).sqrt()
    }
}

/// Hermitian density matrix. The trace is not assumed to be one: projected
/// reductions carry `⟨P_±⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DMatrix<C64>);

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        Ok(Self(entries))
    }

    pub fn from_pure(psi: &QuantumState) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Self(&v * v.adjoint())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.0
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn hermiticity_residual(&self) -> f64 {
        linalg::max_abs_dense(&(&self.0 - self.0.adjoint()))
    }

    /// Replaces the matrix by its Hermitian part.
    pub fn symmetrize(&mut self) {
        let h = (&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        self.0 = h;
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().cloned().unwrap_or(0.0)
    }

    /// Copy scaled to unit trace.
    pub fn renormalized(&self) -> Result<Self> {
        let t = self.trace();
        if t.abs() < 1e-300 {
            return Err(Error::ConditioningUndefined(t));
        }
        Ok(Self(&self.0 / C64::new(t, 0.0)))
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// `tr(ρ O)` for a sparse operator.
    pub fn expectation(&self, op: &LinearOperator) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for (r, c, v) in op.iter() {
            acc += v * self.0[(c, r)];
        }
        acc.re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_dense(&(&self.0 - &other.0))
    }
}
